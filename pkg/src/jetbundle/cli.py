"""Command-line driver: tabulate operators, inspect atlases, run verification suites.

Exit status is 0 when everything passes, 1 when a verification check fails
and 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import proj_surface as PS
from .diffops import cmz_coefficient
from .errors import AtlasParseError, IndexOutOfRange, UnknownSuite
from .report import Report, jsonable
from .verify import SUITES, run_suite

SEED_ENV = "JETBUNDLE_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PARTIAL = r"\partial"


# emit -------------------------------------------------------------------------


def _latex_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else rf"\frac{{{c.numerator}}}{{{c.denominator}}}"


def _latex_power(sym: str, e: int) -> str:
    return sym if e == 1 else f"{sym}^{{{e}}}"


def operator_table(kind: str, n: int) -> dict:
    """The JSON contract for emit: kind, n, coefficients [[i, num, den], ...], weights [a, b]."""
    if kind == "cmz":
        if n < 1:
            raise IndexOutOfRange(f"the CMZ operator needs n >= 1, got {n}")
        coeffs = [(i, cmz_coefficient(n, i)) for i in range(n)]
        weights = [0, 0]
    elif kind == "bol":
        if n < 0:
            raise IndexOutOfRange(f"the Bol operator needs n >= 0, got {n}")
        coeffs = [(n + 1, Fraction(1))]
        weights = [n, -n - 2]
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return {"kind": kind, "n": n,
            "coefficients": [[i, c.numerator, c.denominator] for i, c in coeffs],
            "weights": weights}


def render_latex(table: dict) -> str:
    n, (a, b) = table["n"], table["weights"]
    if table["kind"] == "bol":
        return rf"\partial^{{{n + 1}}} : \mathcal{{L}}^{{{a}}} \to \mathcal{{L}}^{{{b}}}"
    terms = []
    for i, num, den in table["coefficients"]:
        f = "f" if i == 0 else ("f'" if i == 1 else f"f^{{({i})}}")
        coeff, d = _latex_coeff(Fraction(num, den)), _latex_power(PARTIAL, n - i)
        terms.append(rf"{coeff}\, {f}\, {d}")
    return rf"\mathcal{{D}}_{{{n}}}(f) = " + " + ".join(terms) + \
        rf" \quad (\mathcal{{L}}^{{{a}}} \to \mathcal{{L}}^{{{b}}})"


def emit_operator(kind: str, n: int, fmt: str = "json") -> str:
    table = operator_table(kind, n)
    if fmt == "latex":
        return render_latex(table) + "\n"
    return json.dumps(table, sort_keys=True) + "\n"


# verify -----------------------------------------------------------------------


def build_report(suite: str, seed: int, n=None, k=None, atlases=None, timestamp: bool = True) -> dict:
    """A VerificationReport as a plain dict, checks sorted by id."""
    names = SUITES if suite == "all" else (suite,)
    if suite != "all" and suite not in SUITES:
        raise UnknownSuite(suite)
    combined = Report(suite)
    params, breakdown, measured = {}, {}, {}
    for name in names:
        rep, p = run_suite(name, seed, n=n, k=k, atlases=atlases)
        if suite == "all":
            for r in rep.records:
                r.check_id = f"{name}/{r.check_id}"
            params[name] = p
        else:
            params = p
        combined.extend(rep)
        breakdown.update(rep.extra.get("breakdown", {}))
        if "s2_bracket_constant" in rep.extra:
            measured["s2_bracket_constant"] = rep.extra["s2_bracket_constant"]
    checks = sorted((r.to_json() for r in combined.records), key=lambda c: c["id"])
    out = {
        "suite": suite,
        "seed": seed,
        "params": jsonable(params),
        "checks": checks,
        "witnesses": [{"id": c["id"], **c["witness"]} for c in checks if "witness" in c],
        "summary": combined.summary(),
    }
    if breakdown:
        out["breakdown"] = breakdown
    if measured:
        out["measured"] = measured
    if timestamp:
        out["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return out


# atlas ------------------------------------------------------------------------


def resolve_atlas(ref: str) -> PS.Atlas:
    """A file path, or the name of a shipped atlas."""
    path = Path(ref)
    if path.is_file():
        return PS.load_atlas(path)
    if ref in PS.SHIPPED_ATLASES:
        return PS.shipped_atlas(ref)
    raise FileNotFoundError(f"no atlas file or shipped atlas named {ref!r}")


def describe_atlas(A: PS.Atlas) -> str:
    validation = PS.validate_atlas(A)
    lines = [f"atlas {A.name or '<unnamed>'}",
             f"  charts: {len(A.charts)} ({', '.join(c.id for c in A.charts)})",
             f"  transitions: {len(A.transitions)}"]
    for t in A.transitions:
        (a, b), (c, d) = t.matrix
        lines.append(f"    {t.source} -> {t.target}: [[{a}, {b}], [{c}, {d}]] det = {t.determinant}")
    lines.append(f"  triples: {len(A.triples)}")
    lines.append(f"  validation: {'valid' if validation.valid else 'INVALID'}"
                 f" ({validation.report.summary()['passed']}/{len(validation.report.records)} checks)")
    for r in validation.report.failures:
        lines.append(f"    FAIL {r.check_id}: {json.dumps(jsonable(r.witness), sort_keys=True)}")
    lines.append(f"  lift obstructions: {len(validation.obstructions)}")
    for ob in validation.obstructions:
        lines.append(f"    {'/'.join(ob.triple)}: product {jsonable(ob.product)} = -declared {jsonable(ob.declared)}")
    return "\n".join(lines) + "\n"


# argument parsing -------------------------------------------------------------


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        print(f"jetbundle: {SEED_ENV}={raw!r} is not an integer", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetbundle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_emit = sub.add_parser("emit", help="tabulate the CMZ or Bol operator")
    p_emit.add_argument("kind", choices=["cmz", "bol"])
    p_emit.add_argument("--n", type=int, required=True, help="order index (cmz: n >= 1, bol: n >= 0)")
    p_emit.add_argument("--format", choices=["json", "latex"], default="json")

    p_ver = sub.add_parser("verify", help="run a seeded verification suite")
    p_ver.add_argument("suite", help=f"one of {', '.join(SUITES)}, all")
    p_ver.add_argument("--n", type=int, default=None, help="upper bound on n for the suite")
    p_ver.add_argument("--k", type=int, default=None, help="single weight for the casimir suite")
    p_ver.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    p_ver.add_argument("--atlas", action="append", default=None, help="atlas file or shipped name (repeatable)")
    p_ver.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-identical reports")
    p_ver.add_argument("--output", default=None, help="write the report here instead of stdout")

    p_at = sub.add_parser("atlas", help="describe or re-emit an atlas")
    p_at.add_argument("path", nargs="?", default=None, help="atlas file or shipped name")
    p_at.add_argument("--atlas", dest="atlas_opt", default=None, metavar="ATLAS", help="same as path")
    p_at.add_argument("--format", choices=["text", "json"], default="text",
                      help="text: census and validation; json: canonical atlas file")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "emit":
            sys.stdout.write(emit_operator(args.kind, args.n, args.format))
            return EXIT_OK
        if args.command == "verify":
            seed = args.seed if args.seed is not None else _default_seed()
            atlases = [resolve_atlas(a) for a in args.atlas] if args.atlas else None
            report = build_report(args.suite, seed, args.n, args.k, atlases, timestamp=not args.no_timestamp)
            text = json.dumps(report, indent=2, sort_keys=True) + "\n"
            if args.output:
                Path(args.output).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            s = report["summary"]
            print(f"{args.suite}: {s['passed']}/{s['total']} checks passed", file=sys.stderr)
            return EXIT_OK if s["failed"] == 0 else EXIT_FAIL
        ref = args.path or args.atlas_opt
        if ref is None:
            parser.error("atlas needs a path")
        A = resolve_atlas(ref)
        if args.format == "json":
            sys.stdout.write(PS.dump_atlas(A))
            return EXIT_OK
        sys.stdout.write(describe_atlas(A))
        return EXIT_OK if PS.validate_atlas(A).valid else EXIT_FAIL
    except AtlasParseError as exc:
        print(f"jetbundle: atlas parse error: {exc}", file=sys.stderr)
    except UnknownSuite as exc:
        print(f"jetbundle: unknown suite {exc.args[0]!r}; choose from {', '.join(SUITES)}, all", file=sys.stderr)
    except (IndexOutOfRange, FileNotFoundError) as exc:
        print(f"jetbundle: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
