"""Jets of weighted local sections in chart coordinates.

A jet stores divided Taylor coefficients a_0..a_m of a local section of L^k
around a finite base point of a chart.  For the weight-n order-n case these
fibers are identified with S^n(V) by evaluating global forms, which gives the
canonical splitting of the truncation maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadOrder, BasePointAtInfinity, OrderWeightMismatch, PoleAtBasePoint, PoleAtExpansionPoint
from .exact_kernel import ZERO, Poly, RatFunc, binomial, ratfunc_taylor, taylor_coeffs, to_rational
from .proj_line import BinaryForm, Mobius, PointP1, dehomogenize, homogenize, weight_pullback

STANDARD_CHART = "std"


def _affine(base) -> Fraction:
    if isinstance(base, PointP1):
        if not base.is_affine:
            raise BasePointAtInfinity("jets are based at finite chart points; change chart first")
        return base.affine
    return to_rational(base)


@dataclass(frozen=True)
class Jet:
    """Order-m jet of a weight-k local section at a finite point of a chart."""

    weight: int
    base: Fraction
    coeffs: tuple
    chart: str = STANDARD_CHART

    def __post_init__(self):
        object.__setattr__(self, "base", _affine(self.base))
        object.__setattr__(self, "coeffs", tuple(to_rational(c) for c in self.coeffs))
        if not self.coeffs:
            raise BadOrder("a jet needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def point(self) -> PointP1:
        return PointP1(self.base, 1)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def taylor_poly(self) -> Poly:
        """sum_i a_i (z - base)^i as a polynomial in z."""
        return Poly(self.coeffs).shift(-self.base)

    def __add__(self, other: "Jet") -> "Jet":
        self._check_same_fiber(other)
        return Jet(self.weight, self.base, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.chart)

    def scale(self, s) -> "Jet":
        s = to_rational(s)
        return Jet(self.weight, self.base, [a * s for a in self.coeffs], self.chart)

    def _check_same_fiber(self, other: "Jet"):
        if (self.weight, self.base, self.order, self.chart) != (other.weight, other.base, other.order, other.chart):
            raise ValueError("jets live in different fibers")


def jet_of_local(f, k: int, p, m: int, chart: str = STANDARD_CHART) -> Jet:
    base = _affine(p)
    try:
        coeffs = ratfunc_taylor(RatFunc.coerce(f), base, m)
    except PoleAtExpansionPoint as exc:
        raise PoleAtBasePoint(str(exc)) from None
    return Jet(k, base, coeffs, chart)


def eval_global(form: BinaryForm, p, m: int, chart: str = STANDARD_CHART) -> Jet:
    """Restriction of a global section of L^n to the m-th order neighbourhood of p."""
    base = _affine(p)
    return Jet(form.degree, base, taylor_coeffs(dehomogenize(form), base, m), chart)


def reconstruct(j: Jet) -> BinaryForm:
    """The unique degree-n form whose n-jet at j.base is j (standard chart)."""
    if j.order != j.weight or j.weight < 0:
        raise OrderWeightMismatch(f"order {j.order} and weight {j.weight} must agree")
    return homogenize(j.taylor_poly(), j.weight)


def split(j: Jet, m: int) -> Jet:
    """Canonical lift J^n(L^n) -> J^m(L^n): extend by the jet of the global form."""
    if j.order != j.weight or j.weight < 0:
        raise OrderWeightMismatch(f"order {j.order} and weight {j.weight} must agree")
    if m < j.order:
        raise BadOrder(f"cannot split into order {m} < {j.order}")
    return eval_global(reconstruct(j), j.base, m, j.chart)


def truncate(j: Jet, order: int) -> Jet:
    if order < 0 or order > j.order:
        raise BadOrder(f"cannot truncate an order-{j.order} jet to order {order}")
    return Jet(j.weight, j.base, j.coeffs[: order + 1], j.chart)


def include_top(c, k: int, n: int, p, chart: str = STANDARD_CHART) -> Jet:
    """The weight-k order-n jet (0, ..., 0, c): the image of K^n (x) L^k."""
    if n < 0:
        raise BadOrder("order must be non-negative")
    return Jet(k, p, [ZERO] * n + [to_rational(c)], chart)


def transformed_base(M: Mobius, base) -> Fraction:
    q = M.inverse()(base)
    if not q.is_affine:
        raise BasePointAtInfinity(f"{M} sends the base point {base} to infinity in the new chart")
    return q.affine


def jet_transition(j: Jet, M: Mobius, chart: str | None = None) -> Jet:
    """Re-express a jet in the chart z_old = M(z_new), based at M^{-1}(base)."""
    q = transformed_base(M, j.base)
    pulled = weight_pullback(M, RatFunc.from_poly(j.taylor_poly()), j.weight)
    coeffs = ratfunc_taylor(pulled, q, j.order)
    return Jet(j.weight, q, coeffs, j.chart if chart is None else chart)


def jet_transition_matrix(M: Mobius, q, m: int, k: int) -> list:
    """Coefficient matrix R with jet_transition(j, M).coeffs = R @ j.coeffs at new base q.

    Column i is the Taylor expansion at q of (c w + d)^k (M w - M q)^i; with
    s = c q + d this is t^i s^(-i) (s + c t)^(k - i), t = w - q.
    """
    q = to_rational(q)
    s = M.factor(q)
    if not s:
        raise BasePointAtInfinity(f"{M} sends {q} to infinity")
    return [
        [binomial(k - i, r - i) * M.c ** (r - i) * s ** (k - i - r) if r >= i else ZERO for i in range(m + 1)]
        for r in range(m + 1)
    ]


def symbolic_jet_transition_matrix(M: Mobius, m: int, k: int) -> list:
    """jet_transition_matrix with the new base point left as the variable z (RatFunc entries)."""
    s = RatFunc.from_poly(M.factor_poly())
    return [
        [s ** (k - i - r) * (binomial(k - i, r - i) * M.c ** (r - i)) if r >= i else RatFunc() for i in range(m + 1)]
        for r in range(m + 1)
    ]


def eval_frame_matrix(q, n: int) -> list:
    """Columns: n-jets at q of the monomial basis X^l Y^(n-l) of S^n(V)."""
    q = to_rational(q)
    return [[binomial(l, j) * q ** (l - j) if l >= j else ZERO for l in range(n + 1)] for j in range(n + 1)]


def symbolic_eval_frame_matrix(point: RatFunc, n: int) -> list:
    """eval_frame_matrix at a symbolic point (a RatFunc in z)."""
    return [
        [point ** (l - j) * binomial(l, j) if l >= j else RatFunc() for l in range(n + 1)] for j in range(n + 1)
    ]
