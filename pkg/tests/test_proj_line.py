from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from jetbundle.errors import ContractionOverflow, DegreeTooLarge, NotUnimodular, ZeroVector
from jetbundle.exact_kernel import Poly, RatFunc, mat_mul
from jetbundle.proj_line import (
    BinaryForm,
    Covector,
    Mobius,
    PointP1,
    Vec2,
    contract_omega,
    dehomogenize,
    form_action_matrix,
    homogenize,
    mult_v,
    s2_to_endomorphism,
    s2_to_vector_field,
    sl2_act_form,
    sym_power_matrix,
    symplectic_dual,
    symplectic_preimage,
    theta,
    vector_field_to_s2,
    weight_pullback,
)

from conftest import forms, mobius_maps, ratfuncs, small_q

X, Y = BinaryForm(1, (0, 1)), BinaryForm(1, (1, 0))
S = Mobius(0, -1, 1, 0)
T1 = Mobius(1, 1, 0, 1)


def test_points_normalise():
    assert PointP1(Fraction(1, 2), Fraction(3, 4)) == PointP1(2, 3)
    assert PointP1(-2, -4) == PointP1(1, 2)
    assert PointP1(5, 0) == PointP1.infinity()
    assert not PointP1.infinity().is_affine
    with pytest.raises(ZeroVector):
        PointP1(0, 0)


def test_kernel_vector_vanishes_at_point():
    for pt in (PointP1(3, 2), PointP1(0, 1), PointP1.infinity()):
        v = pt.kernel_vector()
        assert v.as_form()(pt.p, pt.q) == 0


def test_symplectic_dual_values():
    e1, e2 = Vec2(1, 0), Vec2(0, 1)
    assert symplectic_dual(e1)(e1) == 0 and symplectic_dual(e1)(e2) == 1
    assert symplectic_dual(e2)(e1) == -1
    assert symplectic_dual(Vec2(2, 3))(Vec2(2, 3)) == 0


@given(small_q, small_q, small_q, small_q)
def test_theta_alternating_and_preimage(a, b, c, d):
    u, w = Vec2(a, b), Vec2(c, d)
    assert theta(u, w) == -theta(w, u)
    assert symplectic_preimage(symplectic_dual(u)) == u
    assert symplectic_dual(u)(w) == theta(u, w)


def test_mobius_group():
    with pytest.raises(NotUnimodular):
        Mobius(1, 1, 1, 1)
    assert S @ S == -Mobius.identity()
    assert S(PointP1(0)) == PointP1.infinity()
    assert T1(PointP1(2)) == PointP1(3)


@given(mobius_maps(), mobius_maps())
def test_mobius_composition_is_matrix_product(M, N):
    assert (M @ N) @ N.inverse() == M
    pt = PointP1(Fraction(3, 7))
    assert (M @ N)(pt) == M(N(pt))


def test_dehomogenize_and_homogenize():
    F = BinaryForm(2, (0, 2, 1))
    assert dehomogenize(F) == Poly((0, 2, 1))
    assert homogenize(Poly((1, 1)), 3) == BinaryForm(3, (1, 1, 0, 0))
    with pytest.raises(DegreeTooLarge):
        homogenize(Poly.monomial(2), 1)


def test_form_action_worked_values():
    assert sl2_act_form(T1, X) == X + Y
    assert sl2_act_form(S, X ** 2) == Y ** 2
    F = BinaryForm(3, (1, -2, 0, 5))
    assert sl2_act_form(Mobius.identity(), F) == F


def test_weight_pullback_worked_values():
    f = RatFunc(Poly((1, 2)), Poly((3, 0, 1)))
    assert weight_pullback(Mobius.identity(), f, 4) == f
    assert weight_pullback(Mobius.translation(2), f, 3) == RatFunc(Poly((5, 2)), Poly((7, 4, 1)))
    assert weight_pullback(S, 1, 2) == RatFunc(Poly.monomial(2))


@given(mobius_maps(), st.integers(0, 5).flatmap(forms))
def test_form_action_dehomogenizes_to_pullback(M, F):
    assert RatFunc.from_poly(dehomogenize(sl2_act_form(M, F))) == weight_pullback(M, dehomogenize(F), F.degree)


@given(mobius_maps(), mobius_maps(), ratfuncs(), st.integers(-3, 4))
def test_pullback_is_right_action(M, N, f, k):
    assert weight_pullback(M @ N, f, k) == weight_pullback(N, weight_pullback(M, f, k), k)


@given(mobius_maps(), st.integers(0, 4))
def test_form_action_is_sym_power(M, n):
    A = [[M.d, M.b], [M.c, M.a]]  # columns: images of Y, X in the basis (Y, X)
    assert form_action_matrix(M, n) == sym_power_matrix(A, n)


@given(mobius_maps(), mobius_maps(), st.integers(0, 4))
def test_form_action_matrix_antihomomorphism(M, N, n):
    assert form_action_matrix(M @ N, n) == mat_mul(form_action_matrix(N, n), form_action_matrix(M, n))


def test_mult_v_worked_values():
    e1, e2 = Vec2(1, 0), Vec2(0, 1)
    assert mult_v(Y, e1, 1) == BinaryForm(2, (0, 1, 0))
    assert mult_v(BinaryForm(0, (1,)), e1, 2) == X ** 2
    assert mult_v(X + Y, e2, 1) == BinaryForm(2, (1, 1, 0))
    with pytest.raises(ZeroVector):
        mult_v(X, Vec2(0, 0), 1)


def test_contraction_worked_values():
    xs = Covector(1, 0)
    assert contract_omega(X ** 2, xs, 2) == BinaryForm(0, (1,))
    assert contract_omega(Y ** 2, xs, 2) == BinaryForm(0, (0,))
    assert contract_omega(X * Y, xs, 1) == Y.scale(Fraction(1, 2))
    with pytest.raises(ContractionOverflow):
        contract_omega(X, xs, 2)


@given(st.integers(1, 5).flatmap(forms), small_q, small_q)
def test_contraction_matches_sympy_derivative(F, ox, oy):
    x, y = sp.symbols("x y")
    expr = sum(sp.Rational(c.numerator, c.denominator) * x ** i * y ** (F.degree - i) for i, c in enumerate(F.coeffs))
    j = F.degree // 2 + 1
    for _ in range(j):
        expr = sp.Rational(ox.numerator, ox.denominator) * sp.diff(expr, x) + \
            sp.Rational(oy.numerator, oy.denominator) * sp.diff(expr, y)
    expr = sp.expand(expr * sp.factorial(F.degree - j) / sp.factorial(F.degree))
    got = contract_omega(F, Covector(ox, oy), j)
    for i, c in enumerate(got.coeffs):
        coeff = sp.Poly(expr, x, y).coeff_monomial(x ** i * y ** (got.degree - i)) if expr != 0 else 0
        assert Fraction(int(sp.Rational(coeff).p), int(sp.Rational(coeff).q)) == c


@given(st.integers(0, 4).flatmap(forms), small_q, small_q, st.integers(1, 3))
def test_contraction_kills_multiples_of_kernel_vector(F, a, b, j):
    v = Vec2(a, b)
    if v.is_zero():
        return
    omega = symplectic_dual(v)
    G = mult_v(F, v, j)
    # any contraction count that exceeds deg F must vanish
    assert contract_omega(G, omega, F.degree + 1).is_zero()


def test_s2_and_vector_fields():
    assert s2_to_vector_field(Y ** 2) == Poly((1,))
    assert s2_to_vector_field(X * Y) == Poly((0, 1))
    assert s2_to_vector_field(BinaryForm.zero(2)) == Poly()
    q = Poly((2, -1, 3))
    assert s2_to_vector_field(vector_field_to_s2(q)) == q


@given(forms(2))
def test_s2_endomorphisms_are_traceless(Q):
    m = s2_to_endomorphism(Q)
    assert m[0][0] + m[1][1] == 0
