import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from jetbundle import lie_casimir as LC
from jetbundle.exact_kernel import Poly, RatFunc
from jetbundle.proj_line import Mobius

from conftest import mobius_maps, polys, ratfuncs, small_q

Z = sp.Symbol("z")


@st.composite
def fields(draw):
    return LC.VectorField(Poly(draw(st.lists(small_q, max_size=3))))


@st.composite
def sym_matrices(draw):
    vals = draw(st.lists(small_q, min_size=6, max_size=6))
    it = iter(vals)
    m = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            m[i][j] = m[j][i] = next(it)
    return m


def sympy_casimir_scalar(k):
    """Apply E F + F E + H H / 2 with L_q f = q f' - (k/2) q' f, symbolically."""
    f = sp.Function("f")(Z)
    kk = sp.Rational(k)

    def L(q, g):
        return q * sp.diff(g, Z) - kk / 2 * sp.diff(q, Z) * g

    E, H, F = sp.Integer(1), -2 * Z, -Z ** 2
    out = L(E, L(F, f)) + L(F, L(E, f)) + sp.Rational(1, 2) * L(H, L(H, f))
    ratio = sp.simplify(sp.expand(out) / f)
    assert not ratio.has(Z), "Casimir is not scalar"
    return ratio


def test_triple_relations():
    assert LC.bracket(LC.H, LC.E) == LC.E * 2
    assert LC.bracket(LC.H, LC.F) == LC.F * -2
    assert LC.bracket(LC.E, LC.F) == LC.H


def test_vector_fields_are_at_most_quadratic():
    with pytest.raises(ValueError):
        LC.VectorField(Poly.monomial(3))


@given(fields(), fields(), fields())
def test_jacobi(a, b, c):
    total = LC.bracket(a, LC.bracket(b, c)) + LC.bracket(b, LC.bracket(c, a)) + LC.bracket(c, LC.bracket(a, b))
    assert total == LC.VectorField(Poly())


def test_lie_derivative_worked_values():
    f = RatFunc.from_poly(Poly((1, 2, 3)))
    q = LC.VectorField(Poly((1, -1, 2)))
    assert LC.lie_derivative(q, f, 0) == RatFunc.from_poly(q.q) * f.derivative()
    g = LC.VectorField(Poly((0, 3, 1)))
    assert LC.lie_derivative(q, RatFunc.from_poly(g.q), 2) == RatFunc.from_poly(LC.bracket(q, g).q)
    zd = LC.VectorField(Poly((0, 1)))
    for m in range(5):
        for k in (-2, 0, 3):
            zm = RatFunc.from_poly(Poly.monomial(m))
            assert LC.lie_derivative(zd, zm, k) == zm * (m - Fraction(k, 2))


@given(fields(), fields(), ratfuncs(), st.integers(-3, 4))
def test_lie_derivative_is_representation(a, b, f, k):
    lhs = LC.lie_derivative(a, LC.lie_derivative(b, f, k), k) - LC.lie_derivative(b, LC.lie_derivative(a, f, k), k)
    assert lhs == LC.lie_derivative(LC.bracket(a, b), f, k)


def test_casimir_worked_values():
    assert LC.casimir_scalar(0) == 0
    assert LC.casimir_scalar(2) == 4
    assert LC.casimir_scalar(1) == Fraction(3, 2)
    C = LC.casimir_tensor()
    for m in range(6):
        zm = RatFunc.from_poly(Poly.monomial(m))
        assert LC.second_order_lie(C, zm, 2) == zm * 4
        assert not LC.second_order_lie(C, zm, 0)


@pytest.mark.parametrize("k", range(-4, 9))
def test_casimir_scalar_matches_sympy(k):
    expect = sympy_casimir_scalar(k)
    got = LC.casimir_scalar(k)
    assert sp.Rational(got.numerator, got.denominator) == expect
    assert LC.casimir_scalar_from_operator(k) == got


def test_non_invariant_tensor_is_not_scalar():
    op = LC.second_order_lie_op(LC.SymTensor2([(1, LC.E)]), 2)
    assert op.order == 2


def test_casimir_matrix():
    assert [list(r) for r in LC.casimir_tensor().matrix] == [[0, 0, -1], [0, 2, 0], [-1, 0, 0]]


@pytest.mark.parametrize("field", [LC.E, LC.H, LC.F])
def test_casimir_is_ad_invariant(field):
    assert not any(any(r) for r in LC.ad_on_tensor(field, LC.casimir_tensor()))


@given(mobius_maps())
def test_casimir_is_sl2_invariant(M):
    C = LC.casimir_tensor()
    assert LC.transport_tensor(C, M) == [list(r) for r in C.matrix]


@given(mobius_maps())
def test_field_action_is_automorphism(M):
    assert LC.is_lie_automorphism(LC.field_action_matrix(M))


@given(sym_matrices(), st.integers(0, 2 ** 32), st.integers(-3, 5), polys(4))
def test_decomposition_independence(mat, seed, k, f):
    d1 = LC.SymTensor2(LC.polarization_decomposition(mat))
    d2 = LC.SymTensor2(LC.random_decomposition(mat, random.Random(seed)))
    assert d1 == d2
    assert LC.second_order_lie(d1, f, k) == LC.second_order_lie(d2, f, k)
    assert LC.second_order_lie_op(d1, k) == LC.second_order_lie_op(d2, k)


def test_jet_frame_casimir_equals_casimir():
    assert LC.jet_frame_casimir() == LC.casimir_tensor()
    assert LC.s2_bracket_constant() == 1


def test_field_from_jet_section_is_dehomogenization():
    from jetbundle.proj_line import BinaryForm, s2_to_vector_field
    for Q in BinaryForm.basis(2) + [BinaryForm(2, (3, -1, Fraction(1, 2)))]:
        assert LC.field_from_jet_section(Q).q == s2_to_vector_field(Q)


def test_shear_automorphism():
    assert LC.is_lie_automorphism(LC.field_action_matrix(Mobius(1, 1, 0, 1)))
    bad = [[1, 0, 0], [0, 2, 0], [0, 0, 1]]
    assert not LC.is_lie_automorphism(bad)
