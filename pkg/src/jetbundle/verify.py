"""Seeded verification suites.

Each suite turns one group of identities into a list of check records.  Given
the same parameters and seed a suite produces the same records in the same
order, so reports are byte-for-byte reproducible.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction

from . import diffops as D
from . import jets as J
from . import lie_casimir as LC
from . import proj_surface as PS
from .errors import BasePointAtInfinity, UnknownSuite
from .exact_kernel import Poly, RatFunc, rank
from .proj_line import BinaryForm, Mobius, dehomogenize, sl2_act_form, weight_pullback
from .report import Report, check, flag

SUITES = ("splitting", "equivariance-cmz", "bol", "phi", "casimir", "atlas")


def rand_q(rng: random.Random, lo=-9, hi=9, den=5) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_mobius(rng: random.Random) -> Mobius:
    """A random SL(2, Q) matrix with small entries and, usually, c != 0."""
    while True:
        a = rand_q(rng, -4, 4, 3)
        if not a:
            continue
        b, c = rand_q(rng, -4, 4, 3), rand_q(rng, -4, 4, 3)
        return Mobius(a, b, c, (1 + b * c) / a)


def rand_poly(rng: random.Random, degree: int) -> Poly:
    return Poly([rand_q(rng) for _ in range(degree + 1)])


def rand_form(rng: random.Random, n: int) -> BinaryForm:
    return BinaryForm(n, [rand_q(rng) for _ in range(n + 1)])


def _mobius_moving(rng: random.Random, base) -> Mobius:
    """A random Mobius map for which base stays finite in the new chart."""
    while True:
        M = rand_mobius(rng)
        if M.inverse()(base).is_affine:
            return M


# suites ------------------------------------------------------------------------


def suite_splitting(seed: int, max_n: int = 6, max_m: int = 10, count: int = 200) -> Report:
    rng = random.Random(seed)
    rep = Report("splitting")
    for idx in range(count):
        n = rng.randint(0, max_n)
        m = rng.randint(n, max_m)
        base = rand_q(rng)
        j = J.Jet(n, base, [rand_q(rng) for _ in range(n + 1)])
        tag = f"splitting[{idx:03d}]"
        inputs = dict(n=n, m=m, base=base, coeffs=list(j.coeffs))
        lifted = J.split(j, m)
        rep.add(check(tag + ".truncate_split", J.truncate(lifted, n), j, **inputs))
        M = _mobius_moving(rng, base)
        rep.add(check(tag + ".equivariant", J.jet_transition(lifted, M), J.split(J.jet_transition(j, M), m),
                      mobius=str(M), **inputs))
        F = J.reconstruct(j)
        rep.add(check(tag + ".reconstruct", J.reconstruct(J.eval_global(F, base, n)), F, **inputs))
        rep.add(check(tag + ".eval_equivariant", J.jet_transition(J.eval_global(F, base, m), M),
                      J.eval_global(sl2_act_form(M, F), M.inverse()(base), m), mobius=str(M), **inputs))
        if m >= 1:
            top = J.include_top(rand_q(rng), n, m, base)
            rep.add(flag(tag + ".exactness", J.truncate(top, m - 1).is_zero(), **inputs))
    return rep


def suite_equivariance_cmz(seed: int, max_n: int = 5, mobius_count: int = 20, max_degree: int = 6) -> Report:
    rng = random.Random(seed)
    rep = Report("equivariance-cmz")
    maps = [rand_mobius(rng) for _ in range(mobius_count)]
    tests = [RatFunc.from_poly(Poly.monomial(e)) for e in range(max_degree + 1)]
    for n in range(1, max_n + 1):
        for mi, M in enumerate(maps):
            f = RatFunc.from_poly(rand_poly(rng, rng.randint(0, max_degree)))
            tag = f"cmz[n={n},M={mi:02d}]"
            pulled = weight_pullback(M, f, 2 * n)
            op, op_pulled = D.cmz_operator(n, f), D.cmz_operator(n, pulled)
            inputs = dict(n=n, mobius=str(M), f=str(f))
            rep.add(check(tag + ".conjugation", D.conjugate(op, M), op_pulled, **inputs))
            for e, g in enumerate(tests):
                lhs = weight_pullback(M, D.apply_op(op, g), 0)
                rhs = D.apply_op(op_pulled, weight_pullback(M, g, 0))
                rep.add(check(tag + f".apply[z^{e}]", lhs, rhs, **inputs))
    return rep


def suite_bol(seed: int, max_n: int = 4, mobius_count: int = 20) -> Report:
    rng = random.Random(seed)
    rep = Report("bol")
    maps = [rand_mobius(rng) for _ in range(mobius_count)]
    for n in range(0, max_n + 1):
        op = D.bol_operator(n)
        sym = D.symbol(op)
        rep.add(flag(f"bol[n={n}].symbol", sym.value == 1 and sym.weight == 0,
                     {"symbol": str(sym.value), "weight": sym.weight}, n=n))
        rep.add(check(f"bol[n={n}].standard_chart", op, D.derivative_op(n + 1, n, -n - 2), n=n))
        for bi in range(3):
            base = rand_q(rng)
            rep.add(check(f"bol[n={n}].base_independent[{bi}]", D.bol_operator(n, base), op, n=n, base=base))
        for mi, M in enumerate(maps):
            rep.add(check(f"bol[n={n}].invariant[M={mi:02d}]", D.conjugate(op, M), op, n=n, mobius=str(M)))
        for e, F in enumerate(BinaryForm.basis(n)):
            rep.add(check(f"bol[n={n}].kills_basis[{e}]", D.apply_op(op, dehomogenize(F)), RatFunc(), n=n))
        for ri in range(5):
            F = rand_form(rng, n)
            rep.add(check(f"bol[n={n}].kills_random[{ri}]", D.apply_op(op, dehomogenize(F)), RatFunc(),
                          n=n, form=list(F.coeffs)))
        for pi in range(5):
            f = rand_poly(rng, n + 3)
            p = rand_q(rng)
            j = J.jet_of_local(f, n, p, n + 1)
            rep.add(check(f"bol[n={n}].pointwise[{pi}]", D.bol_pointwise(n, j),
                          D.apply_op(op, f)(p), n=n, f=str(f), p=p))
    return rep


def suite_phi(seed: int, max_n: int = 6, hom_n: int = 5, agree_n: int = 4, jet_n: int = 5) -> Report:
    rng = random.Random(seed)
    rep = Report("phi")
    for n in range(1, max_n + 1):
        for xi in range(2):
            x = Fraction(0) if xi == 0 else rand_q(rng)
            tag = f"phi[n={n},x={xi}]"
            rep.add(flag(tag + ".ker_beta_is_im_mv", D.kernel_beta_equals_image_mv(n, x), n=n, x=x))
            rep.add(flag(tag + ".contraction_kills_im_mv", D.kills_image_of_mv(n, x), n=n, x=x))
            rep.add(check(tag + ".quotient_rank", D.quotient_rank(n, x), n, n=n, x=x))
            rep.add(check(tag + ".beta_surjective", rank(D.beta_matrix(n, x)), n, n=n, x=x))
    for n in range(1, hom_n + 1):
        x = rand_q(rng)
        v, omega = D.point_data(x)
        contraction = D.contraction_matrix(n, omega)
        tag = f"homs[n={n}]"
        # commuting with N alone leaves N^r o i_omega, r < n
        rep.add(check(tag + ".n_equivariant_dim_is_n", len(D.n_equivariant_homs(n, x)), n, n=n, x=x))
        borel = D.borel_equivariant_homs(n, x)
        rep.add(check(tag + ".borel_dim", len(borel), 1, n=n, x=x))
        if len(borel) == 1:
            s = D.proportional(borel[0], contraction)
            rep.add(flag(tag + ".spanned_by_contraction", s is not None and s != 0, n=n, x=x))
        for i in range(2 * n):
            rep.add(flag(tag + f".filtration[{i}]", D.filtration_step_holds(n, i, x), n=n, i=i, x=x))
    for n in range(1, jet_n + 1):
        for ji in range(8):
            p = rand_q(rng)
            j = J.Jet(2 * n, p, [rand_q(rng) for _ in range(n)])
            tag = f"phi_jets[n={n},{ji}]"
            fiber = D.phi_apply(n, j)
            rep.add(check(tag + ".symbol_is_gamma", fiber[n], D.gamma(j), n=n, p=p, jet=list(j.coeffs)))
            rep.add(check(tag + ".no_constant_term", fiber[0], 0, n=n))
            pert = RatFunc.from_poly(j.taylor_poly() + Poly((-p, 1)) ** n * rand_poly(rng, 3))
            rep.add(check(tag + ".well_defined", D.phi_of_local(n, pert, p), fiber, n=n, p=p))
    for n in range(1, agree_n + 1):
        for xi in range(3):
            x = rand_q(rng)
            via_jets = D.phi_matrix_via_jets(n, x)
            via_contr, _ = D.phi_matrix_via_contraction(n, x)
            rep.add(check(f"phi_agree[n={n},{xi}]", via_contr, via_jets, n=n, x=x))
            lam = rand_q(rng, 1, 9, 4)
            v, omega = D.point_data(x)
            scaled = D.phi_fiber_contraction(n, x, omega * lam)
            base_map = D.phi_fiber_contraction(n, x, omega)
            rep.add(check(f"phi_omega[n={n},{xi}].scales", scaled, base_map.scale(lam ** (n + 1)), n=n, lam=lam))
            normalized, _ = D.phi_matrix_via_contraction(n, x, omega * lam)
            rep.add(check(f"phi_omega[n={n},{xi}].normalized_independent", normalized, via_contr, n=n, lam=lam))
    return rep


def suite_casimir(seed: int, k_values=tuple(range(-4, 9)), tensors: int = 10, max_degree: int = 8) -> Report:
    rng = random.Random(seed)
    rep = Report("casimir")
    C = LC.casimir_tensor()
    mu2 = LC.casimir_scalar(2, max_degree)
    rep.add(check("casimir.mu2", mu2, Fraction(4)))
    for k in k_values:
        mu = LC.casimir_scalar(k, max_degree)
        rep.add(check(f"casimir[k={k}].ratio", mu / mu2, Fraction(k * (k + 2), 8), k=k))
        rep.add(check(f"casimir[k={k}].operator_scalar", LC.casimir_scalar_from_operator(k), mu, k=k))
    for name, q in (("E", LC.E), ("H", LC.H), ("F", LC.F)):
        rep.add(flag(f"casimir.ad_invariant[{name}]", not any(any(r) for r in LC.ad_on_tensor(q, C))))
    for mi in range(5):
        M = rand_mobius(rng)
        rep.add(check(f"casimir.sl2_invariant[{mi}]", LC.transport_tensor(C, M), [list(r) for r in C.matrix],
                      mobius=str(M)))
    tests = [RatFunc.from_poly(Poly.monomial(e)) for e in range(4)] + [RatFunc(Poly((1,)), Poly((1, 1)))]
    for ti in range(tensors):
        mat = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                mat[i][j] = mat[j][i] = rand_q(rng)
        d1 = LC.SymTensor2(LC.polarization_decomposition(mat))
        d2 = LC.SymTensor2(LC.random_decomposition(mat, rng))
        rep.add(check(f"decomp[{ti}].same_tensor", d1.matrix, d2.matrix))
        k = rng.randint(-3, 5)
        for fi, f in enumerate(tests):
            rep.add(check(f"decomp[{ti}].same_operator[{fi}]", LC.second_order_lie(d1, f, k),
                          LC.second_order_lie(d2, f, k), k=k))
    rep.add(check("casimir.L_C_equals_L_Cbar", LC.jet_frame_casimir().matrix, C.matrix))
    for k in (0, 1, 2, 5):
        rep.add(check(f"casimir.L_C_equals_L_Cbar_operator[k={k}]", LC.second_order_lie_op(LC.jet_frame_casimir(), k),
                      LC.second_order_lie_op(C, k), k=k))
    c = LC.s2_bracket_constant()
    rep.add(flag("casimir.s2_bracket_is_scalar", c is not None and c != 0, {"detail": f"constant {c}"}))
    rep.extra["s2_bracket_constant"] = str(c)
    return rep


def suite_atlas(seed: int, atlases=None, max_n: int = 5, bol_n: int = 4) -> Report:
    rng = random.Random(seed)
    rep = Report("atlas")
    if atlases is None:
        atlases = [PS.shipped_atlas(name) for name in PS.SHIPPED_ATLASES]
    for A in atlases:
        validation = PS.validate_atlas(A)
        if not validation.valid:
            # an invalid atlas has no well-defined transitions to test further
            for r in validation.report.records:
                r.check_id = f"{A.name}:{r.check_id}"
                rep.add(r)
            continue
        sub = PS.surface_checks(A, max_n=max_n, bol_n=bol_n)
        for r in sub.records:
            r.check_id = f"{A.name}:{r.check_id}"
            rep.add(r)
        for n in range(0, bol_n + 1):
            wrong = PS.global_bol_check(A, n, weights=(n, -n))
            rep.add(flag(f"{A.name}:bol_negative_control[n={n}]", not wrong.passed, n=n))
        for t in A.transitions:
            M = t.mobius
            for n in range(0, max_n + 1):
                pts = [rand_q(rng) for _ in range(3)]
                j = J.Jet(n, pts[0], [rand_q(rng) for _ in range(n + 1)], chart=t.source)
                tag = f"{A.name}:transport[{t.source}->{t.target}:n={n}]"
                rep.add(flag(tag + ".transitive", PS.transport_is_path_independent(j, pts[1], pts[2]), n=n))
                try:
                    rep.add(flag(tag + ".chart_compatible", PS.transport_commutes_with_transition(j, M, pts[1]), n=n))
                    back = PS.loop_transport(j, A, t.source, t.target, rand_q(rng))
                    rep.add(check(tag + ".loop", back, j, n=n))
                except BasePointAtInfinity:
                    continue
            for n in range(1, 4):
                un = PS.phi_surface_check(A, n, normalized=False)
                glue = all(r.passed for r in un.records if r.check_id.startswith("phi.glue"))
                sym = all(r.passed for r in un.records if r.check_id.startswith("phi.symbol"))
                rep.add(flag(f"{A.name}:phi_unnormalized[{t.source}->{t.target}:n={n}]", glue and not sym, n=n))
    rep.extra["breakdown"] = transition_breakdown(rep)
    return rep


_TRANSITION = re.compile(r"^([^:]*):.*?\[([^\]:@]+->[^\]:@]+)")


def transition_breakdown(rep: Report) -> dict:
    """Pass/total counts per atlas and transition, read off the check ids."""
    out = {}
    for r in rep.records:
        m = _TRANSITION.match(r.check_id)
        if not m:
            continue
        cell = out.setdefault(m.group(1), {}).setdefault(m.group(2), {"passed": 0, "total": 0})
        cell["total"] += 1
        cell["passed"] += r.passed
    return out


def run_suite(name: str, seed: int, n: int | None = None, k: int | None = None, atlases=None) -> tuple:
    """Run one suite; returns (Report, params dict)."""
    if name == "splitting":
        params = {"max_n": n if n is not None else 6, "max_m": 10, "count": 200}
        return suite_splitting(seed, **params), params
    if name == "equivariance-cmz":
        params = {"max_n": n if n is not None else 5, "mobius_count": 20, "max_degree": 6}
        return suite_equivariance_cmz(seed, **params), params
    if name == "bol":
        params = {"max_n": n if n is not None else 4, "mobius_count": 20}
        return suite_bol(seed, **params), params
    if name == "phi":
        params = {"max_n": n if n is not None else 6}
        params.update(hom_n=min(params["max_n"], 5), agree_n=min(params["max_n"], 4), jet_n=min(params["max_n"], 5))
        return suite_phi(seed, **params), params
    if name == "casimir":
        ks = (k,) if k is not None else tuple(range(-4, 9))
        params = {"k_values": list(ks), "tensors": 10, "max_degree": 8}
        return suite_casimir(seed, k_values=ks, tensors=10, max_degree=8), params
    if name == "atlas":
        params = {"max_n": n if n is not None else 5, "bol_n": 4,
                  "atlases": [a.name for a in atlases] if atlases else list(PS.SHIPPED_ATLASES)}
        return suite_atlas(seed, atlases, max_n=params["max_n"], bol_n=4), params
    raise UnknownSuite(name)
