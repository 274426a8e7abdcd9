"""Differential operators between weighted local sections.

Covers the operator algebra itself (application, composition, symbol and the
Mobius conjugation), the splitting-defect operator of order n+1 from weight n
to weight -n-2, the CMZ family D_n(f), and the finite-dimensional model of
the fiber isomorphism phi : J^{n-1}(T^n) -> Diff^n_0(O, O).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import IndexOutOfRange, InconsistentPointCovector, OrderWeightMismatch
from .exact_kernel import (
    ONE,
    ZERO,
    Poly,
    RatFunc,
    mat_mul,
    nullspace,
    rank,
    same_column_space,
    taylor_coeffs,
    to_rational,
    transpose,
)
from .jets import Jet, eval_global, split, truncate
from .proj_line import (
    BinaryForm,
    Covector,
    Mobius,
    PointP1,
    Vec2,
    as_point,
    contract_omega,
    mult_v,
    symplectic_dual,
    symplectic_preimage,
    weight_pullback,
)


@dataclass(frozen=True)
class DiffOp:
    """sum_j coeffs[j](z) d^j/dz^j, mapping weight-a sections to weight-b sections."""

    coeffs: tuple
    source_weight: int = 0
    target_weight: int = 0

    def __post_init__(self):
        cs = [RatFunc.coerce(c) for c in self.coeffs]
        while len(cs) > 1 and not cs[-1]:
            cs.pop()
        if not cs:
            cs = [RatFunc()]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def weights(self) -> tuple:
        return (self.source_weight, self.target_weight)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def coeff(self, j: int) -> RatFunc:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else RatFunc()

    def __add__(self, other: "DiffOp") -> "DiffOp":
        if self.weights != other.weights:
            raise ValueError("cannot add operators with different weights")
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp([self.coeff(j) + other.coeff(j) for j in range(n)], *self.weights)

    def scale(self, s) -> "DiffOp":
        return DiffOp([c * s for c in self.coeffs], *self.weights)

    def at(self, z) -> tuple:
        """Coefficient values at a point (an operator on the fiber there)."""
        return tuple(c(z) for c in self.coeffs)

    def __str__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            d = "" if j == 0 else ("d" if j == 1 else f"d^{j}")
            terms.append(f"({c})*{d}" if d else f"({c})")
        return " + ".join(reversed(terms)) or "0"


@dataclass(frozen=True)
class Symbol:
    """Leading coefficient of an operator, a local section of L^weight."""

    value: RatFunc
    weight: int


def derivative_op(order: int = 1, source_weight: int = 0, target_weight: int = 0) -> DiffOp:
    return DiffOp([0] * order + [1], source_weight, target_weight)


def apply_op(P: DiffOp, f) -> RatFunc:
    f = RatFunc.coerce(f)
    out = RatFunc()
    deriv = f
    for j, c in enumerate(P.coeffs):
        if j:
            deriv = deriv.derivative()
        if c:
            out = out + c * deriv
    return out


def symbol(P: DiffOp) -> Symbol:
    return Symbol(P.coeffs[-1], 2 * P.order + P.target_weight - P.source_weight)


def _d_after(coeffs: list) -> list:
    """Coefficients of d/dz composed after sum_k q_k d^k."""
    out = [RatFunc()] * (len(coeffs) + 1)
    for k, q in enumerate(coeffs):
        if q:
            out[k] = out[k] + q.derivative()
            out[k + 1] = out[k + 1] + q
    return out


def compose(P: DiffOp, Q: DiffOp) -> DiffOp:
    """P o Q (apply Q first); Q's target weight must be P's source weight."""
    if Q.target_weight != P.source_weight:
        raise ValueError("weights do not chain")
    out = [RatFunc()] * (P.order + Q.order + 1)
    cur = list(Q.coeffs)  # coefficients of d^j o Q
    for j, p in enumerate(P.coeffs):
        if j:
            cur = _d_after(cur)
        if p:
            for k, q in enumerate(cur):
                if q:
                    out[k] = out[k] + p * q
    return DiffOp(out, Q.source_weight, P.target_weight)


def conjugate(P: DiffOp, M: Mobius) -> DiffOp:
    """The operator P^M with P^M(pull_a(M, f)) = pull_b(M, P(f)) for every f.

    Writing h = f o M = s^(-a) g with s = c z + d, every f^(j)(M z) equals
    (s^2 d/dz)^j h, because M'(z) = s^(-2) for a determinant-one matrix.
    """
    s = RatFunc.from_poly(M.factor_poly())
    s2 = s * s
    a, b = P.weights
    cur = [s ** (-a)]  # coefficients of (s^2 d)^j o s^(-a)
    out = [RatFunc()] * (P.order + 1)
    for j, c in enumerate(P.coeffs):
        if j:
            cur = [s2 * q for q in _d_after(cur)]
        if c:
            cj = weight_pullback(M, c, 0)
            for k, q in enumerate(cur):
                if q:
                    out[k] = out[k] + cj * q
    sb = s ** b
    return DiffOp([sb * c for c in out], a, b)


# the splitting-defect (Bol) operator ----------------------------------------


def bol_pointwise(n: int, j: Jet) -> Fraction:
    """(n+1)! times the top-coefficient defect between j and the canonical lift of its n-jet."""
    if j.order != n + 1 or j.weight != n:
        raise OrderWeightMismatch(f"expected an order-{n + 1} jet of weight {n}")
    lifted = split(truncate(j, n), n + 1)
    return math.factorial(n + 1) * (j.coeffs[n + 1] - lifted.coeffs[n + 1])


def bol_operator(n: int, base=0) -> DiffOp:
    """Order-(n+1) operator L^n -> L^(-n-2) read off from bol_pointwise on unit jets.

    The defect is linear in the jet and sum_j c_j f^(j)(p) = sum_j c_j j! a_j,
    so c_j = defect(e_j) / j!.  In the standard chart this is d^(n+1).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    coeffs = []
    for i in range(n + 2):
        unit = Jet(n, base, [ONE if r == i else ZERO for r in range(n + 2)])
        coeffs.append(bol_pointwise(n, unit) / math.factorial(i))
    return DiffOp(coeffs, n, -n - 2)


# CMZ operators ---------------------------------------------------------------


def cmz_coefficient(n: int, i: int) -> Fraction:
    """(2n - i)! / (i! (n - i)! (n - i - 1)!)."""
    if n < 1 or not 0 <= i <= n - 1:
        raise IndexOutOfRange(f"need 1 <= n and 0 <= i <= n-1, got n={n}, i={i}")
    f = math.factorial
    return Fraction(f(2 * n - i), f(i) * f(n - i) * f(n - i - 1))


def cmz_operator(n: int, f) -> DiffOp:
    """D_n(f) = sum_i cmz_coefficient(n, i) f^(i) d^(n-i), acting on functions."""
    if n < 1:
        raise IndexOutOfRange("the CMZ family starts at n = 1")
    f = RatFunc.coerce(f)
    coeffs = [RatFunc()] * (n + 1)
    deriv = f
    for i in range(n):
        if i:
            deriv = deriv.derivative()
        coeffs[n - i] = deriv * cmz_coefficient(n, i)
    return DiffOp(coeffs, 0, 0)


def phi_normalization(n: int) -> Fraction:
    """n!(n-1)!/(2n)!, the factor making the symbol of phi(j) equal a_0(j)."""
    f = math.factorial
    return Fraction(f(n) * f(n - 1), f(2 * n))


def phi_of_local(n: int, f, p, normalized: bool = True) -> tuple:
    """Fiber at p of the (normalised) CMZ operator attached to a weight-2n local section."""
    op = cmz_operator(n, f)
    vals = op.at(p)
    vals = vals + (ZERO,) * (n + 1 - len(vals))
    scale = phi_normalization(n) if normalized else ONE
    return tuple(v * scale for v in vals)


def phi_apply(n: int, j: Jet, normalized: bool = True) -> tuple:
    """phi on a weight-2n order-(n-1) jet: coefficient vector (c_0, ..., c_n) at j.base."""
    if j.order != n - 1 or j.weight != 2 * n:
        raise OrderWeightMismatch(f"phi_{n} takes order-{n - 1} jets of weight {2 * n}")
    return phi_of_local(n, RatFunc.from_poly(j.taylor_poly()), j.base, normalized)


def gamma(j: Jet) -> Fraction:
    """Projection J^{n-1}(T^n) -> T^n: the value a_0."""
    return j.coeffs[0]


def fiber_conjugate(vec: Sequence, M: Mobius, q) -> tuple:
    """Transport a pointwise operator (c_0..c_N at M(q), weights 0 -> 0) to the chart point q."""
    P = DiffOp(list(vec), 0, 0)
    vals = conjugate(P, M).at(q)
    return vals + (ZERO,) * (len(vec) - len(vals))


# finite-dimensional model of phi_x --------------------------------------------


@dataclass(frozen=True)
class FiberMap:
    """A matrix between named finite-dimensional spaces (columns = images of source basis)."""

    matrix: tuple
    source: str
    target: str

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(to_rational(x) for x in row) for row in self.matrix))

    @property
    def shape(self) -> tuple:
        return (len(self.matrix), len(self.matrix[0]) if self.matrix else 0)

    def rank(self) -> int:
        return rank(self.matrix)

    def scale(self, s) -> "FiberMap":
        return FiberMap([[x * s for x in row] for row in self.matrix], self.source, self.target)


def _columns_to_matrix(cols: list) -> list:
    return [[col[i] for col in cols] for i in range(len(cols[0]))]


def point_data(x) -> tuple:
    """(v, omega) at a point: v spans ker(V -> L_x), omega = theta(v, .)."""
    pt = as_point(x)
    v = pt.kernel_vector()
    return v, symplectic_dual(v)


def beta_matrix(n: int, x) -> list:
    """beta : S^{2n}(V) -> J^{n-1}(L^{2n})_x, evaluated in the monomial basis."""
    p = as_point(x)
    return _columns_to_matrix([eval_global(e, p, n - 1).coeffs for e in BinaryForm.basis(2 * n)])


def mult_v_matrix(n: int, v: Vec2) -> list:
    """m_v : S^n(V) -> S^{2n}(V), F -> v^n F."""
    return _columns_to_matrix([mult_v(e, v, n).coeffs for e in BinaryForm.basis(n)])


def contraction_matrix(n: int, omega: Covector) -> list:
    """i_omega : S^{2n}(V) -> S^{n-1}(V), contraction with omega^(n+1)."""
    return _columns_to_matrix([contract_omega(e, omega, n + 1).coeffs for e in BinaryForm.basis(2 * n)])


def phi_fiber_contraction(n: int, x, omega: Covector | None = None) -> FiberMap:
    """The contraction map S^{2n}(V) -> S^{n-1}(V) attached to the point x.

    omega must be theta-dual to a vector spanning ker(V -> L_x); by default
    the point's own covector is used.
    """
    pt = as_point(x)
    if omega is None:
        omega = point_data(pt)[1]
    if omega.is_zero():
        raise InconsistentPointCovector("omega must be nonzero")
    v = symplectic_preimage(omega)
    if v.x * pt.p + v.y * pt.q:
        raise InconsistentPointCovector(f"the theta-dual of omega does not vanish at {pt}")
    return FiberMap(contraction_matrix(n, omega), f"S^{2 * n}(V)", f"S^{n - 1}(V)")


def kills_image_of_mv(n: int, x, omega: Covector | None = None) -> bool:
    pt = as_point(x)
    fm = phi_fiber_contraction(n, pt, omega)
    v = symplectic_preimage(omega) if omega is not None else point_data(pt)[0]
    prod = mat_mul([list(r) for r in fm.matrix], mult_v_matrix(n, v))
    return not any(any(r) for r in prod)


def quotient_rank(n: int, x, omega: Covector | None = None) -> int:
    """Rank of the map induced on S^{2n}/im(m_v); equals the full rank since m_v lies in the kernel."""
    if not kills_image_of_mv(n, x, omega):
        raise InconsistentPointCovector("contraction does not vanish on im(m_v)")
    return phi_fiber_contraction(n, x, omega).rank()


def kernel_beta_equals_image_mv(n: int, x) -> bool:
    pt = as_point(x)
    ker = nullspace(beta_matrix(n, pt), 2 * n + 1)
    v = point_data(pt)[0]
    return same_column_space(transpose(ker), mult_v_matrix(n, v))


def serre_identification(n: int, p) -> list:
    """S^{n-1}(V) -> Diff^n_0(O, O)_p through residues at p.

    G pairs with a jet g by Res_{z=p} g(z) G(z, 1) dz / (z - p)^(n+1); as an
    operator this is sum_j c_j d^j with c_j = [w^(n-j)] G(p + w, 1) / j!.
    """
    p = to_rational(p)
    cols = []
    for e in BinaryForm.basis(n - 1):
        h = taylor_coeffs(Poly(e.coeffs), p, n - 1)
        cols.append([ZERO] + [h[n - j] / math.factorial(j) for j in range(1, n + 1)])
    return _columns_to_matrix(cols)


def phi_matrix_via_jets(n: int, p) -> list:
    """phi_apply o beta : S^{2n}(V) -> fiber coefficients (c_0..c_n) at p."""
    cols = [phi_apply(n, eval_global(e, p, n - 1)) for e in BinaryForm.basis(2 * n)]
    return _columns_to_matrix([list(c) for c in cols])


def phi_matrix_via_contraction(n: int, p, omega: Covector | None = None) -> tuple:
    """(serre_identification o i_omega, scalar) with the scalar fixed by sigma o phi = gamma.

    Returns the normalised matrix and the scalar that was applied.
    """
    pt = as_point(p)
    raw = mat_mul(serre_identification(n, pt.affine), [list(r) for r in phi_fiber_contraction(n, pt, omega).matrix])
    target = [eval_global(e, pt, 0).coeffs[0] for e in BinaryForm.basis(2 * n)]
    top = raw[n]
    k = next(i for i, t in enumerate(top) if t)
    scalar = target[k] / top[k]
    return [[x * scalar for x in row] for row in raw], scalar


def n_operator_matrix(degree: int, v: Vec2, omega: Covector) -> list:
    """The nilpotent N = v (x) omega acting on S^degree(V) as a derivation."""
    cols = []
    for e in BinaryForm.basis(degree):
        if degree == 0:
            cols.append([ZERO])
        else:
            cols.append(list((v.as_form() * e.directional(omega)).coeffs))
    return _columns_to_matrix(cols)


def torus_operator_matrix(degree: int, x=0) -> list:
    """Semisimple H in the stabiliser of x: H v = v, H u = -u with omega(u) = 1."""
    pt = as_point(x)
    v, omega = point_data(pt)
    # complement u with omega(u) = 1, and alpha with alpha(v) = 1, alpha(u) = 0
    u = Vec2(0, 1 / omega.y) if omega.y else Vec2(1 / omega.x, 0)
    det = v.x * u.y - v.y * u.x
    alpha = Covector(u.y / det, -u.x / det)
    cols = []
    for e in BinaryForm.basis(degree):
        if degree == 0:
            cols.append([ZERO])
            continue
        img = v.as_form() * e.directional(alpha) - u.as_form() * e.directional(omega)
        cols.append(list(img.coeffs))
    return _columns_to_matrix(cols)


def _intertwiner_space(n: int, pt: PointP1, constraints: list) -> list:
    """Solve h S = (T + shift) h for each (S, T, shift), together with h m_v = 0."""
    v = point_data(pt)[0]
    mv = mult_v_matrix(n, v)
    rows_t, cols_s = n, 2 * n + 1
    nunk = rows_t * cols_s

    def idx(r, c):
        return r * cols_s + c

    eqs = []
    for src, tgt, shift in constraints:
        for r in range(rows_t):
            for c in range(cols_s):
                row = [ZERO] * nunk
                for k in range(cols_s):
                    if src[k][c]:
                        row[idx(r, k)] += src[k][c]
                for k in range(rows_t):
                    if tgt[r][k]:
                        row[idx(k, c)] -= tgt[r][k]
                if shift:
                    row[idx(r, c)] -= shift
                eqs.append(row)
    for r in range(rows_t):
        for c in range(n + 1):
            row = [ZERO] * nunk
            for k in range(cols_s):
                if mv[k][c]:
                    row[idx(r, k)] += mv[k][c]
            eqs.append(row)
    basis = nullspace(eqs, nunk)
    return [[vec[r * cols_s:(r + 1) * cols_s] for r in range(rows_t)] for vec in basis]


def n_equivariant_homs(n: int, x=0) -> list:
    """Basis of {h : S^{2n} -> S^{n-1} | h N = N h, h m_v = 0} as matrices.

    This space is n-dimensional: N^r o i_omega lies in it for 0 <= r < n.
    """
    pt = as_point(x)
    v, omega = point_data(pt)
    ns = n_operator_matrix(2 * n, v, omega)
    nt = n_operator_matrix(n - 1, v, omega)
    return _intertwiner_space(n, pt, [(ns, nt, 0)])


def borel_equivariant_homs(n: int, x=0) -> list:
    """As n_equivariant_homs, adding the torus of the stabiliser of x.

    The torus acts on omega^(n+1) with weight -(n+1), so h H = (H - (n+1)) h.
    The solution space is one-dimensional, spanned by i_omega.
    """
    pt = as_point(x)
    v, omega = point_data(pt)
    ns = n_operator_matrix(2 * n, v, omega)
    nt = n_operator_matrix(n - 1, v, omega)
    hs = torus_operator_matrix(2 * n, pt)
    ht = torus_operator_matrix(n - 1, pt)
    return _intertwiner_space(n, pt, [(ns, nt, 0), (hs, ht, -(n + 1))])


def proportional(a, b) -> Fraction | None:
    """The scalar s with a == s * b, or None when no such scalar exists."""
    flat_a = [x for row in a for x in row]
    flat_b = [x for row in b for x in row]
    k = next((i for i, y in enumerate(flat_b) if y), None)
    if k is None:
        return ZERO if not any(flat_a) else None
    s = flat_a[k] / flat_b[k]
    return s if all(x == s * y for x, y in zip(flat_a, flat_b)) else None


def filtration_step_holds(n: int, i: int, x=0) -> bool:
    """N maps v^(2n-i-1) S^(i+1)(V) onto v^(2n-i) S^i(V) inside S^{2n}(V)."""
    pt = as_point(x)
    v, omega = point_data(pt)
    ns = n_operator_matrix(2 * n, v, omega)
    upper = _columns_to_matrix([mult_v(e, v, 2 * n - i - 1).coeffs for e in BinaryForm.basis(i + 1)])
    lower = _columns_to_matrix([mult_v(e, v, 2 * n - i).coeffs for e in BinaryForm.basis(i)])
    return same_column_space(mat_mul(ns, upper), lower)
