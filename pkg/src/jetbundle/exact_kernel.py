"""Exact rational scalars, univariate polynomials and rational functions.

Scalars are :class:`fractions.Fraction`.  Polynomials and rational functions
live in the single variable ``z`` (a chart coordinate) and are immutable.
Nothing in here ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

from .errors import PoleAtExpansionPoint, ZeroDenominator

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def binomial(n: int, k: int) -> Fraction:
    """Generalised binomial coefficient C(n, k) for any integer n and k >= 0."""
    if k < 0:
        return ZERO
    out = ONE
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


class Poly:
    """Dense polynomial in ``z`` with Fraction coefficients, lowest degree first.

    The zero polynomial has no coefficients and degree ``-1``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_rational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @classmethod
    def _trusted(cls, cs: list) -> "Poly":
        while cs and not cs[-1]:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def linear(cls, a, b) -> "Poly":
        """The polynomial a*z + b."""
        return cls((b, a))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else ZERO

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        if lc == 1:
            return self
        return Poly._trusted([c / lc for c in self.coeffs])

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = Poly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] += c
        return Poly._trusted(cs)

    __radd__ = __add__

    def __neg__(self):
        return Poly._trusted([-c for c in self.coeffs])

    def __sub__(self, other):
        other = Poly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = Poly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly()
            return Poly._trusted([c * other for c in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        cs = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                cs[i + j] += x * y
        return Poly._trusted(cs)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial; use RatFunc")
        out, base = Poly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other: "Poly"):
        if not other.coeffs:
            raise ZeroDenominator("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        dd = len(dv) - 1
        inv_lc = 1 / dv[-1]
        if len(rem) - 1 < dd:
            return Poly(), self
        quo = [ZERO] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if not c:
                continue
            q = c * inv_lc
            quo[k - dd] = q
            for i in range(dd + 1):
                rem[k - dd + i] -= q * dv[i]
        return Poly._trusted(quo), Poly._trusted(rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDenominator("polynomial division by zero scalar")
            return self * (1 / Fraction(other))
        return NotImplemented

    # calculus and evaluation ------------------------------------------

    def __call__(self, x):
        """Evaluate at a scalar, or compose with another Poly."""
        if isinstance(x, Poly):
            out = Poly()
            for c in reversed(self.coeffs):
                out = out * x + c
            return out
        x = to_rational(x)
        out = ZERO
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def derivative(self, k: int = 1) -> "Poly":
        cs = list(self.coeffs)
        for _ in range(k):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return Poly._trusted(cs)

    def shift(self, c) -> "Poly":
        """p(z + c), by repeated synthetic division (Taylor shift)."""
        c = to_rational(c)
        cs = list(self.coeffs)
        n = len(cs)
        if not c:
            return self
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += c * cs[j + 1]
        return Poly._trusted(cs)

    def homogeneous_compose(self, num: "Poly", den: "Poly", total: int) -> "Poly":
        """sum_i p_i num^i den^(total - i); requires total >= degree."""
        out = Poly()
        dpow = [Poly.const(1)]
        for _ in range(total):
            dpow.append(dpow[-1] * den)
        npow = Poly.const(1)
        for i, c in enumerate(self.coeffs):
            if c:
                out = out + npow * dpow[total - i] * c
            npow = npow * num
        return out

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("Poly", self.coeffs))

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if mono and c == 1:
                t = mono
            elif mono and c == -1:
                t = "-" + mono
            else:
                cs = str(c)
                if mono and "/" in cs:
                    cs = f"({cs})"
                t = cs + ("*" + mono if mono else "")
            terms.append(t)
        return " + ".join(terms).replace("+ -", "- ")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (monic remainders keep sizes down)."""
    a, b = a.monic(), b.monic()
    while b.coeffs:
        a, b = b, (a % b).monic()
    return a


def taylor_coeffs(p: Poly, c, m: int) -> tuple:
    """Divided Taylor coefficients a_0..a_m of p at c, i.e. p^(j)(c)/j!."""
    if m < 0:
        raise ValueError("order must be non-negative")
    cs = p.shift(c).coeffs
    return tuple(cs[j] if j < len(cs) else ZERO for j in range(m + 1))


def series_divide(num: Sequence, den: Sequence, m: int) -> tuple:
    """First m+1 coefficients of the power series num/den; den[0] must be nonzero."""
    d0 = den[0]
    out = []
    for j in range(m + 1):
        acc = num[j] if j < len(num) else ZERO
        for i in range(1, min(j, len(den) - 1) + 1):
            acc -= den[i] * out[j - i]
        out.append(acc / d0)
    return tuple(out)


class RatFunc:
    """Rational function num/den in ``z``, always in canonical form.

    Canonical means: den monic, gcd(num, den) = 1, and the zero function is 0/1.
    Equality is therefore structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        num = num if isinstance(num, Poly) else Poly.const(num)
        den = den if isinstance(den, Poly) else Poly.const(den)
        if not den.coeffs:
            raise ZeroDenominator("rational function with zero denominator")
        if not num.coeffs:
            num, den = Poly(), Poly.const(1)
        elif den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        lc = den.leading
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFunc":
        r = object.__new__(cls)
        r.num = num
        r.den = den
        return r

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls._raw(Poly.const(c), Poly.const(1))

    @classmethod
    def z(cls) -> "RatFunc":
        return cls._raw(Poly.z(), Poly.const(1))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls._raw(p, Poly.const(1))

    @staticmethod
    def coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Poly):
            return RatFunc.from_poly(x)
        return RatFunc.const(to_rational(x))

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.coeff(0)

    def __bool__(self):
        return bool(self.num.coeffs)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            if self.den.degree == 0:
                return RatFunc._raw(self.num + o.num, self.den)
            return RatFunc(self.num + o.num, self.den)
        if o.den.degree == 0:
            return RatFunc._raw(self.num + o.num * self.den, self.den)
        if self.den.degree == 0:
            return RatFunc._raw(self.num * o.den + o.num, o.den)
        g = poly_gcd(self.den, o.den)
        if g.degree > 0:
            sd, od = self.den // g, o.den // g
            return RatFunc(self.num * od + o.num * sd, self.den * od)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RatFunc.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RatFunc()
            return RatFunc._raw(self.num * other, self.den)
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.num.coeffs or not o.num.coeffs:
            return RatFunc()
        if self.den.degree == 0 and o.den.degree == 0:
            return RatFunc._raw(self.num * o.num, self.den)
        # cross-cancel before multiplying keeps the result canonical
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1, d2 = (self.num // g1, o.den // g1) if g1.degree > 0 else (self.num, o.den)
        n2, d1 = (o.num // g2, self.den // g2) if g2.degree > 0 else (o.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.leading
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        return RatFunc._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num.coeffs:
            raise ZeroDenominator("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc._raw(self.num ** k, self.den ** k) if k else RatFunc.const(1)

    # calculus and evaluation ------------------------------------------

    def derivative(self, k: int = 1) -> "RatFunc":
        r = self
        for _ in range(k):
            if r.den.degree == 0:
                r = RatFunc._raw(r.num.derivative(), r.den)
            else:
                r = RatFunc(r.num.derivative() * r.den - r.num * r.den.derivative(), r.den * r.den)
        return r

    def __call__(self, x) -> Fraction:
        x = to_rational(x)
        d = self.den(x)
        if not d:
            raise PoleAtExpansionPoint(f"{self} has a pole at {x}")
        return self.num(x) / d

    def has_pole_at(self, x) -> bool:
        return not self.den(to_rational(x))

    def mobius_compose(self, a, b, c, d, weight: int = 0) -> "RatFunc":
        """z -> (c z + d)^weight * self((a z + b)/(c z + d))."""
        num_lin, den_lin = Poly.linear(a, b), Poly.linear(c, d)
        e_n = max(self.num.degree, 0)
        e_d = max(self.den.degree, 0)
        top = self.num.homogeneous_compose(num_lin, den_lin, e_n)
        bot = self.den.homogeneous_compose(num_lin, den_lin, e_d)
        shift = weight + e_d - e_n
        if shift >= 0:
            top = top * den_lin ** shift
        else:
            bot = bot * den_lin ** (-shift)
        return RatFunc(top, bot)

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFunc.coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(("RatFunc", self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"


def ratfunc_canonicalize(r: RatFunc) -> RatFunc:
    return RatFunc(r.num, r.den)


def ratfunc_taylor(r: RatFunc, c, m: int) -> tuple:
    """Divided Taylor coefficients of r at c up to order m, by series division."""
    r = RatFunc.coerce(r)
    dt = taylor_coeffs(r.den, c, m)
    if not dt[0]:
        raise PoleAtExpansionPoint(f"denominator of {r} vanishes at {c}")
    nt = taylor_coeffs(r.num, c, m)
    if r.den.degree == 0:
        return tuple(x / dt[0] for x in nt)
    return series_divide(nt, dt, m)


# dense linear algebra over Q (and, where noted, any exact field) ----------


def rref(rows: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form over Fractions; returns (matrix, pivot columns)."""
    m = [list(map(to_rational, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None) -> list:
    """Basis of {x : rows @ x = 0}."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def transpose(a):
    return [list(col) for col in zip(*a)]


def mat_mul(a, b):
    bt = transpose(b)
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = None
            for x, y in zip(row, col):
                if not x or not y:
                    continue
                acc = x * y if acc is None else acc + x * y
            out_row.append(acc if acc is not None else row[0] * 0)
        out.append(out_row)
    return out


def mat_vec(a, v):
    return [sum((x * y for x, y in zip(row, v)), ZERO) for row in a]


def identity(n: int, one=ONE):
    zero = one * 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_inverse(a, one=ONE):
    """Gauss-Jordan inverse over any exact field whose elements support + - * /."""
    n = len(a)
    zero = one * 0
    m = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col]), None)
        if piv is None:
            raise ZeroDenominator("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for i in range(n):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [row[n:] for row in m]


def same_column_space(a, b) -> bool:
    """Whether two matrices (same row count) have equal column spans."""
    ra, rb = rank(transpose(a)), rank(transpose(b))
    return ra == rb == rank(transpose(a) + transpose(b))
