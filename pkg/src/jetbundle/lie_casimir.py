"""Global vector fields on the projective line, Lie derivatives and the Casimir.

A global vector field is q(z) d/dz with deg q <= 2 in the standard chart; its
coordinates are taken in the basis (d, z d, z^2 d).  The sl(2) triple used
throughout is E = d, H = -2z d, F = -z^2 d.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .diffops import DiffOp, compose
from .errors import NotScalar
from .exact_kernel import ZERO, Poly, RatFunc, mat_inverse, mat_mul, to_rational, transpose
from .jets import eval_global, truncate
from .proj_line import BinaryForm, Mobius, s2_to_endomorphism, weight_pullback


@dataclass(frozen=True)
class VectorField:
    """The field q(z) d/dz, deg q <= 2."""

    q: Poly

    def __post_init__(self):
        q = self.q if isinstance(self.q, Poly) else Poly(self.q)
        if q.degree > 2:
            raise ValueError(f"degree {q.degree} coefficient is not a global vector field")
        object.__setattr__(self, "q", q)

    @classmethod
    def from_coords(cls, coords: Sequence) -> "VectorField":
        return cls(Poly(coords))

    @property
    def coords(self) -> tuple:
        return tuple(self.q.coeff(i) for i in range(3))

    def __add__(self, other):
        return VectorField(self.q + other.q)

    def __sub__(self, other):
        return VectorField(self.q - other.q)

    def __mul__(self, s):
        return VectorField(self.q * to_rational(s))

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.q}) d"


E = VectorField(Poly((1,)))
H = VectorField(Poly((0, -2)))
F = VectorField(Poly((0, 0, -1)))
BASIS = (VectorField(Poly((1,))), VectorField(Poly((0, 1))), VectorField(Poly((0, 0, 1))))


def bracket(a: VectorField, b: VectorField) -> VectorField:
    return VectorField(a.q * b.q.derivative() - b.q * a.q.derivative())


def lie_derivative(a: VectorField, f, k: int) -> RatFunc:
    """Lie derivative on weight-k sections: q f' - (k/2) q' f."""
    f = RatFunc.coerce(f)
    q = RatFunc.from_poly(a.q)
    return q * f.derivative() - RatFunc.from_poly(a.q.derivative()) * f * Fraction(k, 2)


def lie_derivative_op(a: VectorField, k: int) -> DiffOp:
    return DiffOp([a.q.derivative() * Fraction(-k, 2), a.q], k, k)


class SymTensor2:
    """A symmetric tensor sum_i lam_i A_i (x) A_i on the vector-field algebra.

    Equality compares the 3x3 coefficient matrices; the decomposition is
    kept because the second-order Lie operator is defined through it.
    """

    __slots__ = ("decomposition", "matrix")

    def __init__(self, decomposition):
        self.decomposition = tuple((to_rational(lam), a) for lam, a in decomposition)
        mat = [[ZERO] * 3 for _ in range(3)]
        for lam, a in self.decomposition:
            c = a.coords
            for i in range(3):
                for j in range(3):
                    mat[i][j] += lam * c[i] * c[j]
        self.matrix = tuple(tuple(row) for row in mat)

    @classmethod
    def from_matrix(cls, mat) -> "SymTensor2":
        return cls(polarization_decomposition(mat))

    def __eq__(self, other):
        if not isinstance(other, SymTensor2):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"SymTensor2({[[str(x) for x in r] for r in self.matrix]})"


def polarization_decomposition(mat) -> list:
    """Diagonal terms plus (e_i + e_j)^2 - e_i^2 - e_j^2 for each off-diagonal pair."""
    terms = []
    for i in range(3):
        for j in range(i, 3):
            s = to_rational(mat[i][j])
            if not s:
                continue
            if i == j:
                terms.append((s, BASIS[i]))
            else:
                terms += [(s, BASIS[i] + BASIS[j]), (-s, BASIS[i]), (-s, BASIS[j])]
    return terms


def random_decomposition(mat, rng: random.Random, extra: int = 3) -> list:
    """Peel off a few random rank-one terms, then polarise the remainder."""
    rest = [[to_rational(x) for x in row] for row in mat]
    terms = []
    for _ in range(extra):
        a = VectorField.from_coords([Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)])
        lam = Fraction(rng.randint(-6, 6), rng.randint(1, 5))
        if not lam or not any(a.coords):
            continue
        terms.append((lam, a))
        c = a.coords
        for i in range(3):
            for j in range(3):
                rest[i][j] -= lam * c[i] * c[j]
    return terms + polarization_decomposition(rest)


def casimir_tensor() -> SymTensor2:
    """C = E F + F E + (1/2) H H, written with rational weights."""
    return SymTensor2([(1, E + F), (-1, E), (-1, F), (Fraction(1, 2), H)])


def second_order_lie(T: SymTensor2, f, k: int) -> RatFunc:
    out = RatFunc()
    for lam, a in T.decomposition:
        out = out + lie_derivative(a, lie_derivative(a, f, k), k) * lam
    return out


def second_order_lie_op(T: SymTensor2, k: int) -> DiffOp:
    out = DiffOp([0], k, k)
    for lam, a in T.decomposition:
        la = lie_derivative_op(a, k)
        out = out + compose(la, la).scale(lam)
    return out


def casimir_scalar(k: int, max_degree: int = 8) -> Fraction:
    """mu_k with L_C f = mu_k f, checked on 1, z, ..., z^max_degree."""
    C = casimir_tensor()
    base = second_order_lie(C, 1, k)
    if not base.is_constant():
        raise NotScalar(f"Casimir on weight {k} sends 1 to {base}")
    mu = base.constant_value()
    for m in range(1, max_degree + 1):
        zm = RatFunc.from_poly(Poly.monomial(m))
        if second_order_lie(C, zm, k) != zm * mu:
            raise NotScalar(f"Casimir on weight {k} is not scalar on z^{m}")
    return mu


def casimir_scalar_from_operator(k: int) -> Fraction:
    """Same scalar, read off the composed operator (must be of order zero)."""
    op = second_order_lie_op(casimir_tensor(), k)
    if op.order != 0 or not op.coeffs[0].is_constant():
        raise NotScalar(f"Casimir operator on weight {k} is {op}")
    return op.coeffs[0].constant_value()


# adjoint and group actions ----------------------------------------------------


def adjoint_matrix(a: VectorField) -> list:
    """Matrix of ad_a in the basis (d, z d, z^2 d); column j is ad_a(BASIS[j])."""
    cols = [bracket(a, b).coords for b in BASIS]
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def ad_on_tensor(a: VectorField, T: SymTensor2) -> list:
    """ad_a applied to a symmetric 2-tensor: R S + S R^T."""
    r = adjoint_matrix(a)
    s = [list(row) for row in T.matrix]
    rs = mat_mul(r, s)
    srt = mat_mul(s, transpose(r))
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(rs, srt)]


def field_action_matrix(M: Mobius) -> list:
    """Pullback of global vector fields (weight 2) by M, in the basis (d, z d, z^2 d)."""
    cols = []
    for b in BASIS:
        img = weight_pullback(M, RatFunc.from_poly(b.q), 2)
        if not img.is_poly() or img.num.degree > 2:
            raise ArithmeticError(f"pullback of {b} left the global vector fields")
        cols.append(VectorField(img.num).coords)
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def transport_tensor(T: SymTensor2, M: Mobius) -> list:
    a = field_action_matrix(M)
    return mat_mul(mat_mul(a, [list(r) for r in T.matrix]), transpose(a))


def is_lie_automorphism(A: Sequence[Sequence]) -> bool:
    """A [x, y] == [A x, A y] on the basis, for A in the (d, z d, z^2 d) coordinates."""
    cols = [VectorField.from_coords([A[i][j] for i in range(3)]) for j in range(3)]

    def apply(v: VectorField) -> VectorField:
        c = v.coords
        out = [sum((A[i][j] * c[j] for j in range(3)), ZERO) for i in range(3)]
        return VectorField.from_coords(out)

    for i in range(3):
        for j in range(3):
            if apply(bracket(BASIS[i], BASIS[j])) != bracket(cols[i], cols[j]):
                return False
    return True


# the structure on S^2(V) and the jet-frame Casimir ------------------------------


def field_from_jet_section(q: BinaryForm, points=(0, 1, -1)) -> VectorField:
    """p o eval_global: interpolate x -> truncate(eval_global(Q, x, 2), 0) at three points."""
    xs = [to_rational(x) for x in points]
    ys = [truncate(eval_global(q, x, 2), 0).coeffs[0] for x in xs]
    vander = [[x ** e for e in range(3)] for x in xs]
    coeffs = [sum((row[i] * y for i, y in enumerate(ys)), ZERO) for row in mat_inverse(vander)]
    return VectorField.from_coords(coeffs)


def s2_trace_form() -> list:
    """tr(rho(Q_i) rho(Q_j)) on the monomial basis Y^2, XY, X^2 of S^2(V)."""
    mats = [s2_to_endomorphism(q) for q in BinaryForm.basis(2)]
    return [[sum((a[r][c] * b[c][r] for r in range(2) for c in range(2)), ZERO) for b in mats] for a in mats]


def jet_frame_casimir() -> SymTensor2:
    """The Casimir of S^2(V) (inverse trace form), pushed to vector fields through p."""
    inv = mat_inverse(s2_trace_form())
    fields = [field_from_jet_section(q) for q in BinaryForm.basis(2)]
    # change of basis: S^2(V) monomials -> field coordinates
    P = [[fields[j].coords[i] for j in range(3)] for i in range(3)]
    mat = mat_mul(mat_mul(P, inv), transpose(P))
    return SymTensor2.from_matrix(mat)


def s2_bracket_constant() -> Fraction | None:
    """The scalar c with [rho Q1, rho Q2] = c rho([Q1, Q2]_fields) for all basis pairs, if any."""
    basis = BinaryForm.basis(2)
    mats = [s2_to_endomorphism(q) for q in basis]
    fields = [field_from_jet_section(q) for q in basis]
    c = None
    for i in range(3):
        for j in range(3):
            a, b = mats[i], mats[j]
            comm = [[sum((a[r][k] * b[k][s] - b[r][k] * a[k][s] for k in range(2)), ZERO) for s in range(2)]
                    for r in range(2)]
            br = bracket(fields[i], fields[j]).coords
            image = [[sum((br[t] * mats[t][r][s] for t in range(3)), ZERO) for s in range(2)] for r in range(2)]
            for r in range(2):
                for s in range(2):
                    if image[r][s]:
                        ratio = comm[r][s] / image[r][s]
                        if c is None:
                            c = ratio
                        elif c != ratio:
                            return None
                    elif comm[r][s]:
                        return None
    return c
