"""Acceptance gate: one group of tests per criterion, exact equality throughout.

Each test carries a ``criterion`` marker; conftest prints a PASS/FAIL line per
criterion at the end of the run.
"""

import json
import re
import time
from collections import Counter
from fractions import Fraction
from math import factorial

import pytest

from jetbundle import cli
from jetbundle import diffops as D
from jetbundle import proj_surface as PS
from jetbundle.exact_kernel import Poly, RatFunc
from jetbundle.verify import (
    suite_atlas,
    suite_bol,
    suite_casimir,
    suite_equivariance_cmz,
    suite_phi,
    suite_splitting,
)

SEED = 20240601


def families(rep) -> Counter:
    """Check ids with bracketed parameters blanked out, counted."""
    return Counter(re.sub(r"\[[^\]]*\]", "[]", r.check_id) for r in rep.records)


def assert_all_pass(rep):
    assert rep.records
    assert rep.passed, [(r.check_id, r.witness) for r in rep.failures[:5]]


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


# 1 ------------------------------------------------------------------------------


def oracle_cmz(n):
    return [Fraction(factorial(2 * n - i), factorial(i) * factorial(n - i) * factorial(n - i - 1))
            for i in range(n)]


@pytest.mark.criterion(1, "CMZ coefficients")
def test_criterion_1_cmz_coefficients(capsys):
    t0 = time.perf_counter()
    tables = {}
    for n in range(1, 7):
        assert cli.main(["emit", "cmz", "--n", str(n)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["kind"] == "cmz" and data["n"] == n
        tables[n] = [Fraction(num, den) for _, num, den in sorted(data["coefficients"])]
        assert [i for i, _, _ in data["coefficients"]] == list(range(n))
    elapsed = time.perf_counter() - t0
    for n, got in tables.items():
        assert got == oracle_cmz(n)
    assert tables[1] == [2]
    assert tables[2] == [12, 6]
    assert tables[3] == [60, 60, 12]
    assert elapsed < 1.0


# 2 ------------------------------------------------------------------------------


@pytest.mark.criterion(2, "CMZ equivariance")
def test_criterion_2_cmz_equivariance():
    rep, elapsed = timed(suite_equivariance_cmz, SEED, max_n=5, mobius_count=20, max_degree=6)
    assert_all_pass(rep)
    fam = families(rep)
    # one conjugation identity and seven test functions per (n, M)
    assert fam["cmz[].conjugation"] == 5 * 20
    assert fam["cmz[].apply[]"] == 5 * 20 * 7
    assert elapsed < 30


# 3 ------------------------------------------------------------------------------


@pytest.mark.criterion(3, "canonical splitting")
def test_criterion_3_splitting():
    rep, elapsed = timed(suite_splitting, SEED, max_n=6, max_m=10, count=200)
    assert_all_pass(rep)
    fam = families(rep)
    assert fam["splitting[].truncate_split"] == 200
    assert fam["splitting[].equivariant"] == 200
    assert elapsed < 10


# 4 ------------------------------------------------------------------------------


@pytest.mark.criterion(4, "Bol operator")
def test_criterion_4_bol():
    rep, elapsed = timed(suite_bol, SEED, max_n=4, mobius_count=20)
    assert_all_pass(rep)
    fam = families(rep)
    assert fam["bol[].symbol"] == 5
    assert fam["bol[].invariant[]"] == 5 * 20
    assert fam["bol[].kills_basis[]"] == sum(n + 1 for n in range(5))
    assert fam["bol[].pointwise[]"] > 0
    assert elapsed < 30


@pytest.mark.criterion(4, "Bol operator")
def test_criterion_4_symbol_and_chart():
    for n in range(5):
        P = D.bol_operator(n)
        s = D.symbol(P)
        assert s.value == RatFunc.from_poly(Poly((1,))) and s.weight == 0
        assert P == D.derivative_op(n + 1, n, -n - 2)


# 5 ------------------------------------------------------------------------------


@pytest.mark.criterion(5, "quotient linear algebra and phi")
def test_criterion_5_linear_algebra_and_phi():
    rep, elapsed = timed(suite_phi, SEED, max_n=6, hom_n=5, agree_n=4, jet_n=5)
    assert_all_pass(rep)
    fam = families(rep)
    for name in ("ker_beta_is_im_mv", "contraction_kills_im_mv", "quotient_rank", "beta_surjective"):
        assert fam[f"phi[].{name}"] >= 6
    assert fam["phi_jets[].symbol_is_gamma"] > 0
    assert fam["phi_jets[].well_defined"] > 0
    assert fam["phi_agree[]"] >= 4
    assert elapsed < 30


@pytest.mark.criterion(5, "quotient linear algebra and phi")
@pytest.mark.xfail(strict=True, reason="h N = N h with h m_v = 0 has an n-dimensional solution space; "
                                       "only the stabiliser torus cuts it to the span of i_omega")
def test_criterion_5_n_equivariant_hom_space_is_one_dimensional():
    for n in range(1, 6):
        for x in (0, Fraction(3, 2)):
            homs = D.n_equivariant_homs(n, x)
            _, omega = D.point_data(x)
            assert len(homs) == 1
            assert D.proportional(homs[0], D.contraction_matrix(n, omega)) is not None


# 6 ------------------------------------------------------------------------------


@pytest.mark.criterion(6, "Casimir scalar")
def test_criterion_6_casimir():
    rep, elapsed = timed(suite_casimir, SEED, k_values=tuple(range(-4, 9)), tensors=10, max_degree=8)
    assert_all_pass(rep)
    fam = families(rep)
    assert fam["casimir.mu2"] == 1
    assert fam["casimir[].ratio"] == 13
    assert fam["casimir[].operator_scalar"] == 13
    assert fam["decomp[].same_tensor"] == 10
    assert fam["casimir.L_C_equals_L_Cbar"] == 1
    assert elapsed < 10


@pytest.mark.criterion(6, "Casimir scalar")
def test_criterion_6_ratio_oracle():
    from jetbundle.lie_casimir import casimir_scalar, casimir_tensor, second_order_lie
    assert casimir_scalar(2) == 4
    for k in range(-4, 9):
        mu = casimir_scalar(k)
        assert mu / casimir_scalar(2) == Fraction(k * (k + 2), 8)
        for m in range(9):
            zm = RatFunc.from_poly(Poly.monomial(m))
            assert second_order_lie(casimir_tensor(), zm, k) == zm * mu


# 7 ------------------------------------------------------------------------------


@pytest.mark.criterion(7, "surface constructions on shipped atlases")
def test_criterion_7_shipped_atlases():
    rep, elapsed = timed(suite_atlas, SEED, max_n=5, bol_n=4)
    assert_all_pass(rep)
    fam = families(rep)
    for name in PS.SHIPPED_ATLASES:
        assert fam[f"{name}:flat.constant[]"] > 0
        assert fam[f"{name}:sym_power[]"] > 0
        assert fam[f"{name}:transport[].transitive"] > 0
        assert fam[f"{name}:bol.glue[]"] == 5
        assert fam[f"{name}:bol_negative_control[]"] == 5
        assert fam[f"{name}:casimir.chart_independent"] > 0
    assert elapsed < 60


@pytest.mark.criterion(7, "surface constructions on shipped atlases")
@pytest.mark.parametrize("name", PS.SHIPPED_ATLASES)
def test_criterion_7_flat_frames_and_controls(name):
    A = PS.shipped_atlas(name)
    for t in A.transitions:
        for n in range(6):
            r = PS.jet_frame_transition(t.mobius, n)
            assert r.constant
            assert PS.sym_power_check(t.mobius, n).passed
    for n in range(5):
        assert PS.global_bol_check(A, n).passed
        assert not PS.global_bol_check(A, n, weights=(n, -n)).passed
    scalars = PS.casimir_surface_check(A, 2).extra["scalars"]
    assert set(scalars.values()) == {"4"}


# 8 ------------------------------------------------------------------------------


@pytest.mark.criterion(8, "CLI contract")
def test_criterion_8_deterministic_reports(tmp_path, capsys):
    for suite in ("splitting", "bol", "casimir", "atlas"):
        a, b = tmp_path / f"{suite}-a.json", tmp_path / f"{suite}-b.json"
        for path in (a, b):
            assert cli.main(["verify", suite, "--seed", "11", "--no-timestamp", "--output", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


@pytest.mark.criterion(8, "CLI contract")
def test_criterion_8_exit_codes(tmp_path, capsys):
    assert cli.main(["emit", "bol", "--n", "3"]) == 0
    with pytest.raises(SystemExit) as info:
        cli.main(["emit"])
    assert info.value.code == 2
    assert cli.main(["verify", "no-such-suite"]) == 2
    assert cli.main(["emit", "cmz", "--n", "0"]) == 2
    flip = tmp_path / "flip.json"
    flip.write_text('{"charts": [{"id": "U0"}, {"id": "U1"}],'
                    ' "transitions": [{"from": "U0", "to": "U1", "matrix": [[[0,1],[-1,1]],[[1,1],[0,1]]]},'
                    ' {"from": "U1", "to": "U0", "matrix": [[[0,1],[-1,1]],[[1,1],[0,1]]]}],'
                    ' "triples": [["U0", "U1", "U0"]]}')
    assert cli.main(["verify", "atlas", "--atlas", str(flip), "--no-timestamp"]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text('{"charts": [')
    assert cli.main(["atlas", str(broken)]) == 2
    capsys.readouterr()


@pytest.mark.criterion(8, "CLI contract")
@pytest.mark.parametrize("name", PS.SHIPPED_ATLASES)
def test_criterion_8_atlas_round_trip(name, tmp_path, capsys):
    assert cli.main(["atlas", name, "--format", "json"]) == 0
    once = capsys.readouterr().out
    path = tmp_path / "a.json"
    path.write_text(once)
    assert cli.main(["atlas", str(path), "--format", "json"]) == 0
    assert capsys.readouterr().out == once
    assert PS.parse_atlas(once) == PS.shipped_atlas(name)
