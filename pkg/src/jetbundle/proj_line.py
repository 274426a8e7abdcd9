"""The plane V, binary forms S^n(V), points of P(V) and the SL(2) action.

Conventions (fixed once, used everywhere):

* V has basis e1 = X, e2 = Y; the area form is the determinant
  theta(u, w) = u.x * w.y - u.y * w.x.
* A binary form of degree n stores the coefficient of X^i Y^(n-i) at index i,
  so its chart representative F(z, 1) has the same coefficient list.
* A Mobius matrix (a, b, c, d) acts on the chart coordinate by
  z -> (a z + b)/(c z + d), and on weight-k local sections by the right action
  f -> (c z + d)^k f(M z).  Composition ``M1 @ M2`` is the matrix product, so
  pulling back by M1 @ M2 equals pulling back by M1 and then by M2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ContractionOverflow, DegreeTooLarge, NotUnimodular, ZeroVector
from .exact_kernel import ONE, ZERO, Poly, RatFunc, to_rational


@dataclass(frozen=True)
class Vec2:
    """A vector x*X + y*Y of V."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", to_rational(self.x))
        object.__setattr__(self, "y", to_rational(self.y))

    def is_zero(self) -> bool:
        return not self.x and not self.y

    def __mul__(self, s):
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def as_form(self) -> "BinaryForm":
        return BinaryForm(1, (self.y, self.x))


@dataclass(frozen=True)
class Covector:
    """A linear functional on V, w -> x*w.x + y*w.y (so X* = Covector(1, 0))."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", to_rational(self.x))
        object.__setattr__(self, "y", to_rational(self.y))

    def __call__(self, v: Vec2) -> Fraction:
        return self.x * v.x + self.y * v.y

    def is_zero(self) -> bool:
        return not self.x and not self.y

    def __mul__(self, s):
        return Covector(self.x * s, self.y * s)

    __rmul__ = __mul__


def theta(u: Vec2, w: Vec2) -> Fraction:
    return u.x * w.y - u.y * w.x


def symplectic_dual(v: Vec2) -> Covector:
    """The covector theta(v, .)."""
    return Covector(-v.y, v.x)


def symplectic_preimage(omega: Covector) -> Vec2:
    """The vector v with symplectic_dual(v) == omega."""
    return Vec2(omega.y, -omega.x)


@dataclass(frozen=True, init=False)
class PointP1:
    """A point [p : q] of P(V), stored as coprime integers with q > 0, or [1 : 0]."""

    p: int
    q: int

    def __init__(self, p, q=1):
        p, q = to_rational(p), to_rational(q)
        if not p and not q:
            raise ZeroVector("[0:0] is not a point of P(V)")
        if not q:
            p, q = 1, 0
        else:
            lcm = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
            pi, qi = int(p * lcm), int(q * lcm)
            g = math.gcd(pi, qi)
            pi, qi = pi // g, qi // g
            if qi < 0:
                pi, qi = -pi, -qi
            p, q = pi, qi
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "q", int(q))

    @classmethod
    def infinity(cls) -> "PointP1":
        return cls(1, 0)

    @property
    def is_affine(self) -> bool:
        return self.q != 0

    @property
    def affine(self) -> Fraction:
        if not self.q:
            raise ValueError("the point at infinity has no affine coordinate")
        return Fraction(self.p, self.q)

    def kernel_vector(self) -> Vec2:
        """A spanning vector of the kernel of V -> L_x: the linear form vanishing here."""
        return Vec2(self.q, -self.p)

    def __str__(self):
        return f"[{self.p}:{self.q}]"


def as_point(x) -> PointP1:
    return x if isinstance(x, PointP1) else PointP1(x, 1)


@dataclass(frozen=True)
class BinaryForm:
    """A degree-n form sum_i coeffs[i] X^i Y^(n-i)."""

    degree: int
    coeffs: tuple

    def __post_init__(self):
        cs = tuple(to_rational(c) for c in self.coeffs)
        if self.degree < 0 or len(cs) != self.degree + 1:
            raise ValueError(f"degree-{self.degree} form needs {self.degree + 1} coefficients, got {len(cs)}")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def zero(cls, n: int) -> "BinaryForm":
        return cls(n, (0,) * (n + 1))

    @classmethod
    def monomial(cls, n: int, i: int, c=1) -> "BinaryForm":
        """c * X^i Y^(n-i)."""
        cs = [0] * (n + 1)
        cs[i] = c
        return cls(n, cs)

    @classmethod
    def basis(cls, n: int) -> list:
        return [cls.monomial(n, i) for i in range(n + 1)]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degrees")
        return BinaryForm(self.degree, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s) -> "BinaryForm":
        s = to_rational(s)
        return BinaryForm(self.degree, [c * s for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            cs = [ZERO] * (self.degree + other.degree + 1)
            for i, a in enumerate(self.coeffs):
                if a:
                    for j, b in enumerate(other.coeffs):
                        cs[i + j] += a * b
            return BinaryForm(self.degree + other.degree, cs)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BinaryForm":
        out = BinaryForm(0, (1,))
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x, y) -> Fraction:
        x, y = to_rational(x), to_rational(y)
        return sum((c * x ** i * y ** (self.degree - i) for i, c in enumerate(self.coeffs)), ZERO)

    def directional(self, omega: Covector) -> "BinaryForm":
        """omega.x * dF/dX + omega.y * dF/dY, a form of degree n - 1."""
        n = self.degree
        if n == 0:
            raise ContractionOverflow("cannot differentiate a degree-0 form")
        cs = [ZERO] * n
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i:
                cs[i - 1] += omega.x * i * c
            if n - i:
                cs[i] += omega.y * (n - i) * c
        return BinaryForm(n - 1, cs)

    def __str__(self):
        n = self.degree
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "".join(
                part
                for part in (
                    "" if i == 0 else ("X" if i == 1 else f"X^{i}"),
                    "" if n - i == 0 else ("Y" if n - i == 1 else f"Y^{n - i}"),
                )
            )
            terms.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(terms) or "0"


def dehomogenize(form: BinaryForm) -> Poly:
    """The chart representative F(z, 1)."""
    return Poly(form.coeffs)


def homogenize(p: Poly, n: int) -> BinaryForm:
    """Y^n p(X/Y)."""
    if p.degree > n:
        raise DegreeTooLarge(f"degree {p.degree} polynomial does not fit in S^{n}(V)")
    return BinaryForm(n, [p.coeff(i) for i in range(n + 1)])


@dataclass(frozen=True, init=False)
class Mobius:
    """A determinant-one matrix [[a, b], [c, d]] acting by z -> (a z + b)/(c z + d)."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __init__(self, a, b, c, d):
        a, b, c, d = (to_rational(x) for x in (a, b, c, d))
        if a * d - b * c != 1:
            raise NotUnimodular(f"determinant of [[{a},{b}],[{c},{d}]] is {a * d - b * c}, not 1")
        for name, val in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, val)

    @classmethod
    def from_matrix(cls, m) -> "Mobius":
        (a, b), (c, d) = m
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, t) -> "Mobius":
        return cls(1, t, 0, 1)

    @classmethod
    def inversion(cls) -> "Mobius":
        """[[0, -1], [1, 0]], z -> -1/z."""
        return cls(0, -1, 1, 0)

    @property
    def matrix(self) -> tuple:
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __neg__(self):
        return Mobius(-self.a, -self.b, -self.c, -self.d)

    def __call__(self, x):
        """Image of a point; an affine coordinate gives back a PointP1."""
        pt = as_point(x)
        return PointP1(self.a * pt.p + self.b * pt.q, self.c * pt.p + self.d * pt.q)

    def factor(self, z) -> Fraction:
        """The automorphy factor c z + d at an affine coordinate."""
        return self.c * to_rational(z) + self.d

    def factor_poly(self) -> Poly:
        return Poly.linear(self.c, self.d)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def weight_pullback(M: Mobius, f, k: int) -> RatFunc:
    """z -> (c z + d)^k f(M z) for a rational function f."""
    f = RatFunc.coerce(f)
    return f.mobius_compose(M.a, M.b, M.c, M.d, weight=k)


def sl2_act_form(M: Mobius, form: BinaryForm) -> BinaryForm:
    """F(X, Y) -> F(aX + bY, cX + dY); dehomogenizes to weight_pullback(M, F(z,1), n)."""
    n = form.degree
    image_x = BinaryForm(1, (M.b, M.a))
    image_y = BinaryForm(1, (M.d, M.c))
    px = [BinaryForm(0, (1,))]
    py = [BinaryForm(0, (1,))]
    for _ in range(n):
        px.append(px[-1] * image_x)
        py.append(py[-1] * image_y)
    out = BinaryForm.zero(n)
    for i, c in enumerate(form.coeffs):
        if c:
            out = out + (px[i] * py[n - i]).scale(c)
    return out


def form_action_matrix(M: Mobius, n: int) -> list:
    """Matrix of sl2_act_form(M, .) on S^n(V) in the monomial basis (columns = images)."""
    cols = [sl2_act_form(M, e).coeffs for e in BinaryForm.basis(n)]
    return [[cols[j][i] for j in range(n + 1)] for i in range(n + 1)]


def mult_v(form: BinaryForm, v: Vec2, j: int) -> BinaryForm:
    """The product v^j * F, with v read as the linear form v.x X + v.y Y."""
    if v.is_zero():
        raise ZeroVector("multiplication by the zero vector")
    return form * (v.as_form() ** j)


def contract_omega(form: BinaryForm, omega: Covector, j: int) -> BinaryForm:
    """j-fold symmetric contraction of F with omega, divided-power normalised.

    Equals (n - j)!/n! times the j-th omega-directional derivative, so that
    contracting X^n with X* any number of times returns the matching power of X.
    """
    n = form.degree
    if j > n:
        raise ContractionOverflow(f"cannot contract {j} slots of a degree-{n} form")
    if j < 0:
        raise ValueError("contraction count must be non-negative")
    out = form
    for _ in range(j):
        out = out.directional(omega)
    scale = Fraction(math.factorial(n - j), math.factorial(n))
    return out.scale(scale)


def s2_to_vector_field(q: BinaryForm) -> Poly:
    """Coefficient q(z) of the global vector field q(z) d/dz attached to Q in S^2(V)."""
    if q.degree != 2:
        raise ValueError("expected a quadratic form")
    return dehomogenize(q)


def vector_field_to_s2(p: Poly) -> BinaryForm:
    return homogenize(p, 2)


def s2_to_endomorphism(q: BinaryForm) -> tuple:
    """The traceless endomorphism of V obtained from Q : V* -> V and theta : V -> V*.

    w -> Q(theta(w, .)) as a 2x2 matrix acting on column vectors (x, y).
    """
    if q.degree != 2:
        raise ValueError("expected a quadratic form")
    c0, c1, c2 = q.coeffs  # Y^2, XY, X^2
    sym = ((c2, c1 / 2), (c1 / 2, c0))
    # theta-dual of (x, y) is the covector (-y, x)
    j = ((ZERO, -ONE), (ONE, ZERO))
    return tuple(
        tuple(sum((sym[r][k] * j[k][col] for k in range(2)), ZERO) for col in range(2)) for r in range(2)
    )


def sym_power_matrix(A: Sequence[Sequence], n: int) -> list:
    """n-th symmetric power of a 2x2 matrix in the basis X^i Y^(n-i) (index i).

    A is written in the basis (Y, X) of S^1(V), i.e. column 0 is the image of Y.
    """
    image_y = BinaryForm(1, (A[0][0], A[1][0]))
    image_x = BinaryForm(1, (A[0][1], A[1][1]))
    cols = [((image_x ** i) * (image_y ** (n - i))).coeffs for i in range(n + 1)]
    return [[cols[j][i] for j in range(n + 1)] for i in range(n + 1)]
