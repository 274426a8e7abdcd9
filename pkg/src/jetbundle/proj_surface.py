"""Projective structures given as formal atlases, and the checks that glue the
projective-line constructions over them.

A transition ``{from: i, to: j, matrix: M}`` means the chart coordinates are
related by z_i = M(z_j).  A weight-k section with representative f_i on chart
i is represented on chart j by weight_pullback(M, f_i, k), and a jet based at
p in chart i moves to M^{-1}(p) in chart j.  For a declared triple (i, j, k)
the lift condition is M_ik = M_ij @ M_jk exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .diffops import (
    DiffOp,
    apply_op,
    bol_operator,
    conjugate,
    fiber_conjugate,
    gamma,
    phi_apply,
    symbol,
)
from .errors import AtlasParseError, BasePointAtInfinity, NotUnimodular
from .exact_kernel import RatFunc, Poly, mat_inverse, mat_mul, to_rational
from .jets import (
    Jet,
    eval_global,
    jet_transition,
    jet_transition_matrix,
    reconstruct,
    symbolic_eval_frame_matrix,
    symbolic_jet_transition_matrix,
)
from .lie_casimir import casimir_tensor, is_lie_automorphism, second_order_lie_op
from .proj_line import Mobius, PointP1, form_action_matrix, sym_power_matrix, weight_pullback
from .report import Report, check, flag

SHIPPED_ATLASES = ("projline", "scaling", "translation")


DEFAULT_SAMPLES = tuple(PointP1(p, q) for p, q in ((0, 1), (1, 1), (-1, 1), (2, 1), (1, 3)))


@dataclass(frozen=True)
class Chart:
    id: str
    sample_points: tuple = ()

    @property
    def points(self) -> tuple:
        """Marked sample points, or a small default set when none are marked."""
        return self.sample_points or DEFAULT_SAMPLES


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    matrix: tuple

    def __post_init__(self):
        (a, b), (c, d) = self.matrix
        object.__setattr__(self, "matrix", tuple(tuple(to_rational(x) for x in row) for row in ((a, b), (c, d))))

    @property
    def determinant(self) -> Fraction:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    @property
    def mobius(self) -> Mobius:
        return Mobius.from_matrix(self.matrix)


@dataclass(frozen=True)
class Atlas:
    charts: tuple
    transitions: tuple
    triples: tuple = ()
    name: str = ""

    def chart(self, cid: str) -> Chart:
        for c in self.charts:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def matrix_between(self, i: str, j: str):
        """M with z_i = M(z_j), from a declared transition or the inverse of one."""
        if i == j:
            return Mobius.identity()
        for t in self.transitions:
            if (t.source, t.target) == (i, j):
                return t.mobius
        for t in self.transitions:
            if (t.source, t.target) == (j, i):
                return t.mobius.inverse()
        return None


@dataclass(frozen=True)
class LiftObstruction:
    """A triple whose product matches the declared transition only up to sign."""

    triple: tuple
    product: tuple
    declared: tuple


@dataclass
class AtlasValidation:
    report: Report
    obstructions: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.report.passed


@dataclass
class SurfaceSection:
    """Local representatives of a section of L^weight, keyed by chart id."""

    weight: int
    reps: dict


def validate_atlas(A: Atlas) -> AtlasValidation:
    rep = Report(f"atlas {A.name}".strip())
    ids = [c.id for c in A.charts]
    rep.add(flag("charts.unique_ids", len(ids) == len(set(ids)), {"ids": ids}))
    for t in A.transitions:
        tid = f"{t.source}->{t.target}"
        rep.add(check(f"det[{tid}]", t.determinant, Fraction(1), transition=tid))
        rep.add(flag(f"known_charts[{tid}]", t.source in ids and t.target in ids, transition=tid))
    obstructions = []
    for tri in A.triples:
        i, j, k = tri
        tid = f"cocycle[{i},{j},{k}]"
        try:
            mij, mjk, mik = A.matrix_between(i, j), A.matrix_between(j, k), A.matrix_between(i, k)
        except NotUnimodular as exc:
            rep.add(flag(tid, False, {"detail": str(exc)}, triple=list(tri)))
            continue
        if None in (mij, mjk, mik):
            rep.add(flag(tid, False, {"detail": "undeclared transition"}, triple=list(tri)))
            continue
        prod = mij @ mjk
        if prod == mik:
            rep.add(flag(tid, True, triple=list(tri)))
        elif prod == -mik:
            obstructions.append(LiftObstruction(tuple(tri), prod.matrix, mik.matrix))
            rep.add(flag(tid, False, {"detail": "LiftObstruction", "product": str(prod), "declared": str(mik)},
                         triple=list(tri)))
        else:
            rep.add(flag(tid, False, {"detail": "not a cocycle", "product": str(prod), "declared": str(mik)},
                         triple=list(tri)))
    return AtlasValidation(rep, obstructions)


def check_section(A: Atlas, s: SurfaceSection) -> Report:
    """Every declared transition relates the representatives by the weight pullback."""
    rep = Report("section")
    for t in A.transitions:
        if t.source in s.reps and t.target in s.reps:
            pulled = weight_pullback(t.mobius, s.reps[t.source], s.weight)
            rep.add(check(f"section[{t.source}->{t.target}]", pulled, RatFunc.coerce(s.reps[t.target])))
    return rep


# flat frames -----------------------------------------------------------------


@dataclass
class FlatFrameResult:
    raw: list  # RatFunc entries, functions of the new base point z
    flat: list  # the same transition in the global-section frame
    constant: bool
    point_dependent: bool
    constant_matrix: list | None

    def matches(self, other) -> bool:
        return self.constant_matrix is not None and self.constant_matrix == [list(r) for r in other]


def jet_frame_transition(T: Mobius, n: int, k: int | None = None) -> FlatFrameResult:
    """Jet transition for (order n, weight k) as a matrix of functions of the new base point,
    and the same map written in the frame of jets of the monomial basis of S^n(V)."""
    k = n if k is None else k
    raw = symbolic_jet_transition_matrix(T, n, k)
    zz = RatFunc.z()
    e_new = symbolic_eval_frame_matrix(zz, n)
    e_old = symbolic_eval_frame_matrix(weight_pullback(T, zz, 0), n)
    flat = mat_mul(mat_mul(mat_inverse(e_new, RatFunc.const(1)), raw), e_old)
    constant = all(not x.derivative() for row in flat for x in row)
    point_dependent = any(not x.is_constant() for row in raw for x in row)
    cm = [[x.constant_value() for x in row] for row in flat] if constant else None
    return FlatFrameResult(raw, flat, constant, point_dependent, cm)


def raw_matrix_agrees(T: Mobius, n: int, k: int, q) -> bool:
    """The closed-form transition matrix at q against jet_transition on unit jets."""
    q = to_rational(q)
    p = T(q)
    if not p.is_affine or not T.factor(q):
        raise BasePointAtInfinity(f"{T} does not map {q} to a finite point")
    R = jet_transition_matrix(T, q, n, k)
    for i in range(n + 1):
        unit = Jet(k, p.affine, [1 if r == i else 0 for r in range(n + 1)])
        col = jet_transition(unit, T).coeffs
        if list(col) != [R[r][i] for r in range(n + 1)]:
            return False
    symbolic = symbolic_jet_transition_matrix(T, n, k)
    return all(symbolic[r][c](q) == R[r][c] for r in range(n + 1) for c in range(n + 1))


def sym_power_check(T: Mobius, n: int) -> Report:
    rep = Report(f"sym_power n={n}")
    one = jet_frame_transition(T, 1, 1)
    big = jet_frame_transition(T, n, n)
    rep.add(flag("flat.constant[1]", one.constant, transition=str(T)))
    rep.add(flag(f"flat.constant[{n}]", big.constant, transition=str(T)))
    if one.constant and big.constant:
        rep.add(check(f"sym_power[{n}]", big.constant_matrix, sym_power_matrix(one.constant_matrix, n),
                      transition=str(T), n=n))
    return rep


# flat transport --------------------------------------------------------------


def transport(j: Jet, target) -> Jet:
    """Parallel transport in J^n(L^n): re-evaluate the global form through j."""
    base = target.affine if isinstance(target, PointP1) else to_rational(target)
    return eval_global(reconstruct(j), base, j.order, j.chart)


def transport_is_path_independent(j: Jet, q, r) -> bool:
    return transport(transport(j, q), r) == transport(j, r)


def transport_commutes_with_transition(j: Jet, M: Mobius, r) -> bool:
    """Transport then change chart equals change chart then transport."""
    lhs = jet_transition(transport(j, r), M)
    rhs = transport(jet_transition(j, M), M.inverse()(r).affine)
    return lhs == rhs


def loop_transport(j: Jet, A: Atlas, source: str, target: str, via) -> Jet:
    """Go to chart `target`, transport to `via`, come back and transport home."""
    M = A.matrix_between(source, target)
    back = A.matrix_between(target, source)
    there = jet_transition(j, M, chart=target)
    moved = transport(there, via)
    home = jet_transition(moved, back, chart=source)
    return transport(home, j.base)


# Theorem-level checks over an atlas ------------------------------------------


def global_bol_check(A: Atlas, n: int, weights: tuple | None = None) -> Report:
    """d^(n+1) conjugated by every transition must come back unchanged."""
    op = bol_operator(n)
    if weights is not None:
        op = DiffOp(op.coeffs, *weights)
    rep = Report(f"bol n={n} weights={op.weights}")
    for t in A.transitions:
        tid = f"{t.source}->{t.target}"
        rep.add(check(f"bol.glue[{tid}]", conjugate(op, t.mobius), op, n=n, weights=list(op.weights)))
        sym = symbol(op)
        rep.add(flag(f"bol.symbol[{tid}]", sym.value == 1 and sym.weight == 0,
                     {"symbol": str(sym.value), "weight": sym.weight}, n=n, weights=list(op.weights)))
    return rep


def casimir_surface_check(A: Atlas, k: int, max_degree: int = 4) -> Report:
    rep = Report(f"casimir k={k}")
    C = casimir_tensor()
    P = second_order_lie_op(C, k)
    mu = P.coeffs[0].constant_value() if P.order == 0 and P.coeffs[0].is_constant() else None
    rep.add(flag("casimir.order_zero", mu is not None, {"operator": str(P)}, k=k))
    scalars = {}
    for t in A.transitions:
        tid = f"{t.source}->{t.target}"
        M = t.mobius
        ff = jet_frame_transition(M, 2, 2)
        rep.add(flag(f"lie.flat_constant[{tid}]", ff.constant, transition=tid))
        if ff.constant:
            rep.add(check(f"lie.frame_is_form_action[{tid}]", ff.constant_matrix, form_action_matrix(M, 2),
                          transition=tid))
            rep.add(flag(f"lie.automorphism[{tid}]", is_lie_automorphism(ff.constant_matrix), transition=tid))
        conj = conjugate(P, M)
        rep.add(check(f"casimir.glue[{tid}]", conj, P, k=k, transition=tid))
        for chart, op in ((t.source, P), (t.target, conj)):
            for m in range(max_degree + 1):
                f = RatFunc.from_poly(Poly.monomial(m))
                out = apply_op(op, f)
                ok = mu is not None and out == f * mu
                rep.add(flag(f"casimir.scalar[{tid}:{chart}:z^{m}]", ok, {"image": str(out)}, k=k))
            scalars[chart] = mu
    rep.add(flag("casimir.chart_independent", len(set(scalars.values())) <= 1, {"scalars": scalars}, k=k))
    rep.extra["scalars"] = {c: str(v) for c, v in sorted(scalars.items())}
    return rep


def _unit_jets(n: int, p) -> list:
    return [Jet(2 * n, p, [1 if r == i else 0 for r in range(n)]) for i in range(n)]


def phi_surface_check(A: Atlas, n: int, normalized: bool = True) -> Report:
    """phi glues across transitions, and its symbol is the projection gamma."""
    rep = Report(f"phi n={n} normalized={normalized}")
    for t in A.transitions:
        tid = f"{t.source}->{t.target}"
        M = t.mobius
        for q in A.chart(t.target).points:
            if not q.is_affine or not M.factor(q.affine):
                continue
            p = M(q)
            if not p.is_affine:
                continue
            for i, j in enumerate(_unit_jets(n, p.affine)):
                here = phi_apply(n, j, normalized)
                there = phi_apply(n, jet_transition(j, M), normalized)
                moved = fiber_conjugate(here, M, q.affine)
                tag = f"[{tid}@{q}:e{i}]"
                rep.add(check("phi.glue" + tag, there, moved, n=n, point=str(q)))
                rep.add(check("phi.symbol" + tag, here[n], gamma(j), n=n, point=str(p)))
    return rep


def surface_checks(A: Atlas, max_n: int = 5, bol_n: int = 4, k_values=(0, 1, 2)) -> Report:
    """Everything the atlas suite runs on one atlas."""
    rep = Report(f"surface {A.name}")
    rep.extend(validate_atlas(A).report)
    for t in A.transitions:
        M = t.mobius
        tid = f"{t.source}->{t.target}"
        for n in range(0, max_n + 1):
            ff = jet_frame_transition(M, n, n)
            rep.add(flag(f"flat.constant[{tid}:n={n}]", ff.constant, transition=tid, n=n))
            if ff.constant:
                rep.add(check(f"flat.form_action[{tid}:n={n}]", ff.constant_matrix, form_action_matrix(M, n),
                              transition=tid, n=n))
            if n >= 1:
                for r in sym_power_check(M, n).records:
                    rep.add(r)
    for n in range(0, bol_n + 1):
        rep.extend(global_bol_check(A, n))
    for k in k_values:
        rep.extend(casimir_surface_check(A, k))
    for n in range(1, 4):
        rep.extend(phi_surface_check(A, n))
    return rep


# atlas files -----------------------------------------------------------------


def _number(val, path) -> Fraction:
    if (isinstance(val, list) and len(val) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in val)):
        if val[1] == 0:
            raise _SchemaError("zero denominator", path)
        return Fraction(val[0], val[1])
    raise _SchemaError("numbers must be [numerator, denominator] integer pairs", path)


class _SchemaError(Exception):
    def __init__(self, message, path):
        super().__init__(message)
        self.path = tuple(path)


def _value_positions(text: str) -> dict:
    """Start offset of every JSON value, keyed by its path of keys and indices."""
    dec = json.JSONDecoder()
    pos = {}

    def ws(i):
        while i < len(text) and text[i] in " \t\r\n":
            i += 1
        return i

    def walk(i, path):
        i = ws(i)
        pos[path] = i
        if text[i] == "{":
            i = ws(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = dec.raw_decode(text, ws(i))
                i = ws(i)
                i = walk(i + 1, path + (key,))
                i = ws(i)
                if text[i] == ",":
                    i += 1
                    continue
                return i + 1
        if text[i] == "[":
            i = ws(i + 1)
            if text[i] == "]":
                return i + 1
            idx = 0
            while True:
                i = walk(i, path + (idx,))
                i = ws(i)
                idx += 1
                if text[i] == ",":
                    i += 1
                    continue
                return i + 1
        _, end = dec.raw_decode(text, i)
        return end

    walk(0, ())
    return pos


def _line_col(text: str, offset: int) -> tuple:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _reject_floats(s):
    raise ValueError(f"float literal {s} is not exact")


def parse_atlas(text: str) -> Atlas:
    """Parse the atlas JSON grammar; errors carry the line and column of the offending value."""
    try:
        data = json.loads(text, parse_float=_reject_floats, parse_constant=_reject_floats)
    except json.JSONDecodeError as exc:
        raise AtlasParseError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise AtlasParseError(str(exc)) from None
    try:
        return _atlas_from_data(data)
    except _SchemaError as exc:
        positions = _value_positions(text)
        path = exc.path
        while path not in positions and path:
            path = path[:-1]
        line, col = _line_col(text, positions.get(path, 0))
        where = "/".join(str(p) for p in exc.path) or "<root>"
        raise AtlasParseError(f"{exc} at {where}", line, col) from None


def _atlas_from_data(data) -> Atlas:
    if not isinstance(data, dict):
        raise _SchemaError("top level must be an object", ())
    unknown = set(data) - {"name", "charts", "transitions", "triples"}
    if unknown:
        raise _SchemaError(f"unknown keys {sorted(unknown)}", (sorted(unknown)[0],))
    name = data.get("name", "")
    if not isinstance(name, str):
        raise _SchemaError("name must be a string", ("name",))
    charts_raw = data.get("charts")
    if not isinstance(charts_raw, list) or not charts_raw:
        raise _SchemaError("charts must be a non-empty list", ("charts",))
    charts = []
    for ci, c in enumerate(charts_raw):
        path = ("charts", ci)
        if not isinstance(c, dict) or not isinstance(c.get("id"), str):
            raise _SchemaError("each chart needs a string id", path)
        pts = []
        for pi, pt in enumerate(c.get("sample_points", [])):
            ppath = path + ("sample_points", pi)
            if not isinstance(pt, list) or len(pt) != 2:
                raise _SchemaError("a point is a pair [p, q] of numbers", ppath)
            p, q = (_number(v, ppath + (i,)) for i, v in enumerate(pt))
            if not p and not q:
                raise _SchemaError("[0:0] is not a point", ppath)
            pts.append(PointP1(p, q))
        charts.append(Chart(c["id"], tuple(pts)))
    transitions = []
    for ti, t in enumerate(data.get("transitions", [])):
        path = ("transitions", ti)
        if not isinstance(t, dict) or not isinstance(t.get("from"), str) or not isinstance(t.get("to"), str):
            raise _SchemaError("a transition needs string 'from' and 'to'", path)
        m = t.get("matrix")
        if not isinstance(m, list) or len(m) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in m):
            raise _SchemaError("matrix must be 2x2", path + ("matrix",))
        entries = tuple(tuple(_number(m[r][c], path + ("matrix", r, c)) for c in range(2)) for r in range(2))
        transitions.append(Transition(t["from"], t["to"], entries))
    triples = []
    for ti, tri in enumerate(data.get("triples", [])):
        if not isinstance(tri, list) or len(tri) != 3 or not all(isinstance(x, str) for x in tri):
            raise _SchemaError("a triple is a list of three chart ids", ("triples", ti))
        triples.append(tuple(tri))
    return Atlas(tuple(charts), tuple(transitions), tuple(triples), name)


def _pair(x: Fraction) -> list:
    return [x.numerator, x.denominator]


def dump_atlas(A: Atlas) -> str:
    data = {
        "name": A.name,
        "charts": [
            {"id": c.id, "sample_points": [[_pair(Fraction(p.p)), _pair(Fraction(p.q))] for p in c.sample_points]}
            for c in A.charts
        ],
        "transitions": [
            {"from": t.source, "to": t.target, "matrix": [[_pair(x) for x in row] for row in t.matrix]}
            for t in A.transitions
        ],
        "triples": [list(t) for t in A.triples],
    }
    return json.dumps(data, indent=2) + "\n"


def load_atlas(path) -> Atlas:
    with open(path, encoding="utf-8") as fh:
        return parse_atlas(fh.read())


def shipped_atlas_text(name: str) -> str:
    return resources.files("jetbundle.atlases").joinpath(f"{name}.json").read_text(encoding="utf-8")


def shipped_atlas(name: str) -> Atlas:
    return parse_atlas(shipped_atlas_text(name))
