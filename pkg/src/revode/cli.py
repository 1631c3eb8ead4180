"""Command-line interface: ``revode <subcommand> ...``.

Exit codes: 0 all checks passed (expected flagged discrepancies allowed),
1 some check failed, 2 usage or input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from . import galois, groups, series
from .diffop import exponents_at, singular_points
from .funcfield import format_point, point
from .parser import ParseError, parse_expression
from .polys import quadratic_form_rank
from .report import FAIL, PASS, Check, Report
from .scalars import conductor, format_scalar
from .scenario import EXAMPLES, ScenarioError, run_scenario

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _default_order():
    raw = os.environ.get("REVODE_ORDER", "60")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"REVODE_ORDER must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("REVODE_ORDER must be positive")
    return n


def _operator(args):
    return parse_expression(args.operator, "operator", var=args.var, modulus=args.modulus, direction=args.direction)


def _exps(es):
    return "{" + ", ".join(format_scalar(e) for e in es) + "}"


def cmd_analyze(args):
    L = _operator(args)
    rep = Report(f"singular points of {L.to_str()}")
    for sp in singular_points(L):
        values = {"regular": str(sp.regular)}
        if sp.exponents:
            values["exponents"] = _exps(sp.exponents)
        rep.add(Check(f"singular point {sp.label()}", PASS, None, values))
    for p in args.point or []:
        rep.add(Check(f"exponents at {p}", PASS, None, {"exponents": _exps(exponents_at(L, point(p)))}))
    return rep


def cmd_series(args):
    L = _operator(args)
    p = point(args.point)
    e = parse_expression(args.exponent, "constant")
    y = series.frobenius(L, p, e, args.order)
    r = series.residual(L, y)
    rep = Report(f"Frobenius series at {format_point(p)} with exponent {format_scalar(e)}")
    rep.add(Check("series", PASS, str(y.prec), {"y": y.to_str()}))
    ok = r.is_zero()
    rep.add(Check("residual vanishes", PASS if ok else FAIL, str(r.prec)))
    return rep


def cmd_invariants(args):
    G, data = groups.group_from_data(args.group)
    names = args.variables.split(",") if args.variables else None
    basis = groups.reynolds_invariants(G, args.degree, names)
    rep = Report(f"degree {args.degree} invariants of {data['name']}")
    values = {"dimension": str(len(basis))}
    for k, b in enumerate(basis):
        values[f"P{k + 1}"] = str(b)
        if args.degree == 2:
            values[f"rank P{k + 1}"] = str(quadratic_form_rank(b))
    rep.add(Check("Reynolds invariants", PASS, None, values, [data["provenance"]]))
    return rep


def cmd_symmetries(args):
    L = _operator(args)
    rep = Report(f"Moebius symmetries of {L.to_str()}")
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        recs = galois.symmetry_group(L)
    v = args.var
    values = {r.map.to_str(v): f"factor {r.factor.to_str(v)}" for r in recs}
    values["order"] = str(len(recs))
    values["dihedral"] = str(galois.is_dihedral_group([r.map for r in recs]))
    rep.add(Check("symmetry group", PASS, None, values, [str(x.message) for x in w]))
    return rep


def cmd_lift(args):
    L = _operator(args)
    m = parse_expression(args.map, "map", var=args.var)
    rep = Report(f"lift of {m.to_str(args.var)} at {args.point}")
    rec = galois.verify_symmetry(L, m)
    if rec is None:
        rep.add(Check("symmetry", FAIL, None, {"map": m.to_str(args.var)}, ["not a symmetry of the operator"]))
        return rep
    rec = galois.compute_lift(L, rec, point(args.point), args.order)
    values = {"status": rec.lift_status}
    if rec.lift:
        C, F = rec.lift
        values["C"] = groups.mat_str(C)
        if F:
            values["F"] = "[" + "; ".join(", ".join(f.to_str(args.var) for f in row) for row in F) + "]"
    rep.add(Check("lift", PASS if rec.lift_status == "computed" else FAIL, None, values, rec.notes))
    return rep


def cmd_descend(args):
    up = _operator(args)
    down = parse_expression(args.downstairs, "operator", var=args.down_var)
    r = parse_expression(args.map, "map", var=args.var)
    cert = galois.verify_descent(up, r, down)
    values = {"map": r.to_str(args.var), "gauge": cert.gauge.to_str(args.var) if cert.gauge is not None else "none"}
    if not cert.verdict and cert.residual is not None:
        values["residual"] = cert.residual.to_str(args.var)
    rep = Report("descent certificate")
    rep.add(Check("descent", PASS if cert.verdict else FAIL, None, values))
    return rep


def cmd_groups(args):
    proj = True if args.projective else None
    G, data = groups.group_from_data(args.name, projective=proj)
    values = {
        "order": str(G.order),
        "center": str(groups.center(G).order),
        "abelian": str(groups.is_abelian(G)),
    }
    if not G.projective:
        values["projective order"] = str(groups.projectivize(G).order)
    if args.normal_in:
        H, _ = groups.group_from_data(args.normal_in, projective=True)
        inner = groups.projectivize(G)
        values[f"normal in {args.normal_in}"] = str(groups.is_normal_in(inner, H))
        values["index"] = str(groups.quotient_order(H, inner))
        values["cyclic quotient"] = str(groups.is_cyclic_quotient(H, inner))
    rep = Report(f"group {data['name']}")
    rep.add(Check("closure", PASS, None, values, [data["provenance"]]))
    return rep


def cmd_knabla(args):
    """k_nabla presentation from the invariant table of a scenario."""
    from .scenario import Context, HANDLERS, load_scenario

    data = load_scenario(args.example)
    table = [c for c in data["checks"] if c["type"] == "invariant_table"]
    if not table:
        raise UsageError(f"scenario {args.example} has no invariant table")
    with conductor(data.get("conductor", 120)):
        ctx = Context(data, args.order)
        rep = Report(f"k_nabla presentation for {args.example}")
        rep.add(HANDLERS["invariant_table"](ctx, table[0]))
        kp = galois.knabla_presentation(ctx.integrals, args.witness, unit_candidate=args.unit)
        values = {"classification": kp.classification, "ratio generators": str(len(kp.ratio_generators))}
        if kp.witness_value is not None:
            values["witness value"] = kp.witness_value.to_str(ctx.var)
        if kp.unit_integral:
            values["unit integral"] = f"{format_scalar(kp.unit_integral[1])}*{kp.unit_integral[0]}"
        rep.add(Check("k_nabla", PASS, None, values, kp.notes))
    return rep


def cmd_verify(args):
    return run_scenario(args.example, order=args.order_override)


def build_parser():
    ap = argparse.ArgumentParser(prog="revode", description="Symmetries, invariants and descent of linear ODEs in exact arithmetic.")
    ap.add_argument("--json", metavar="FILE", help="also write the report as JSON")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="FILE", default=argparse.SUPPRESS, help="also write the report as JSON")
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def op_args(p):
        p.add_argument("operator", help="operator text, e.g. \"y'' - z*y\"")
        p.add_argument("--var", default="z")
        p.add_argument("--modulus", help="p(z) for w^2 = p(z)")
        p.add_argument("--direction", help="derivation direction, e.g. 2*w")

    p = sub.add_parser("analyze", help="singular points and exponents")
    op_args(p)
    p.add_argument("--point", action="append", help="extra point for the exponent table")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("series", help="Frobenius series solution")
    op_args(p)
    p.add_argument("--point", default="0")
    p.add_argument("--exponent", required=True)
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("invariants", help="Reynolds invariants of a curated group")
    p.add_argument("group")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--variables", help="comma separated names")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("symmetries", help="Moebius symmetries of an operator")
    op_args(p)
    p.set_defaults(func=cmd_symmetries)

    p = sub.add_parser("lift", help="lift (C, F) of a symmetry at a fixed point")
    op_args(p)
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("descend", help="verify a descent through a rational map")
    op_args(p)
    p.add_argument("--map", required=True)
    p.add_argument("--downstairs", required=True)
    p.add_argument("--down-var", default="z")
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("groups", help="closure data of a curated group")
    p.add_argument("name")
    p.add_argument("--projective", action="store_true")
    p.add_argument("--normal-in")
    p.set_defaults(func=cmd_groups)

    p = sub.add_parser("knabla", help="k_nabla presentation from a scenario's invariant table")
    p.add_argument("example")
    p.add_argument("--witness")
    p.add_argument("--unit")
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_knabla)

    p = sub.add_parser("verify-example", help="run a bundled scenario")
    p.add_argument("example", help="one of " + ", ".join(EXAMPLES) + " or a scenario JSON path")
    p.add_argument("--order", dest="order_override", type=int)
    p.set_defaults(func=cmd_verify)
    return ap


def run_command(argv, out=None):
    """Run a subcommand; returns (report or None, exit code)."""
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return None, EXIT_USAGE if e.code else EXIT_OK
    try:
        if hasattr(args, "order") and args.order is None:
            args.order = _default_order()
        if getattr(args, "order_override", 0) is None and "REVODE_ORDER" in os.environ:
            args.order_override = _default_order()
        with conductor(120):
            rep = args.func(args)
    except (UsageError, ParseError, ScenarioError, FileNotFoundError) as e:
        print(f"revode: error: {e}", file=sys.stderr)
        return None, EXIT_USAGE
    except Exception as e:  # noqa: BLE001 - reported as an internal failure
        print(f"revode: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return None, EXIT_INTERNAL
    print(rep.to_text(), file=out)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(rep.to_json() + "\n")
    return rep, EXIT_OK if rep.ok else EXIT_FAILED


def main(argv=None):
    _, code = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
