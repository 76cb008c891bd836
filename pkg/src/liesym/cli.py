"""Command-line interface: ``liesym verify|residual|defining|bracket|canonical|identify``.

Exit codes: 0 green / verified, 1 mismatch or inconclusive, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .catalog import BUILTIN, CatalogError, emit_report, load_catalog, verify_all
from .determine import VERIFIED, EquationSpec, defining_system, eq1_system, generic_field, l3_condition, verify_symmetry
from .equivtrans import canonical_label, canonical_label_L3
from .jet import StructureError, VectorField, lie_bracket
from .kernel import EvalContext, ParseError, parse, render, render_monomial
from .kernel.parser import DEFAULT_SYMBOLS, SymbolTable
from .liealg import AlgebraPresentation, AxiomError, algebra_invariants, identify_class

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _symbols(args) -> SymbolTable:
    functions = dict(DEFAULT_SYMBOLS.functions)
    for spec in getattr(args, "function", None) or ():
        name, _, arity = spec.partition(":")
        if not name or not arity.isdigit() or int(arity) < 1:
            raise UsageError(f"--function expects NAME:ARITY, got {spec!r}")
        functions[name] = int(arity)
    params = set(DEFAULT_SYMBOLS.parameters) | set(getattr(args, "param", None) or ())
    return SymbolTable(functions, params)


def _ctx(args) -> EvalContext:
    return EvalContext(seed=args.seed, sample_count=args.samples, tolerance=args.tol)


def _equation(args, symbols) -> EquationSpec:
    if args.form == "L3" and args.g:
        raise UsageError("--g is not accepted with --form L3")
    if args.form == "eq1" and not args.g:
        raise UsageError("--form eq1 needs --g")
    return EquationSpec.parse(args.form, args.f, args.g, symbols)


def _add_sampling(p):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-9)


def _add_symbols(p):
    p.add_argument("--function", action="append", metavar="NAME:ARITY", help="declare an extra arbitrary function")
    p.add_argument("--param", action="append", metavar="NAME", help="declare an extra constant parameter")


def _add_equation(p):
    p.add_argument("--form", choices=("eq1", "L3"), required=True)
    p.add_argument("--g", default=None, help="g(t,x) for u_tx = g u_x + f")
    p.add_argument("--f", required=True, help="f(t,x,u)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liesym", description="Point-symmetry verification for u_tx = g u_x + f")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify catalog entries")
    p.add_argument("--catalog", default=BUILTIN, help="catalog JSON path or 'builtin:'")
    p.add_argument("--entry", action="append", help="restrict to an entry id (repeatable)")
    p.add_argument("--format", choices=("text", "json", "latex"), default="text")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", help="write the report here instead of stdout")
    _add_sampling(p)

    p = sub.add_parser("residual", help="invariance residual of one operator")
    _add_equation(p)
    p.add_argument("--tau", default="0")
    p.add_argument("--xi", default="0")
    p.add_argument("--eta", default="0")
    _add_symbols(p)
    _add_sampling(p)

    p = sub.add_parser("defining", help="defining equations for a general operator")
    _add_equation(p)
    p.add_argument("--structured", action="store_true", help="emit the reduced system for tau(t), xi(x), eta = h u + r")
    p.add_argument("--style", choices=("plain", "latex"), default="plain")
    _add_symbols(p)

    p = sub.add_parser("bracket", help="commutator of two operators")
    p.add_argument("--vf1", required=True, metavar="'tau; xi; eta'")
    p.add_argument("--vf2", required=True, metavar="'tau; xi; eta'")
    p.add_argument("--style", choices=("plain", "latex"), default="plain")
    _add_symbols(p)

    p = sub.add_parser("canonical", help="canonical class of a structured operator")
    p.add_argument("--form", choices=("eq1", "L3"), required=True)
    p.add_argument("--vf", required=True, metavar="'tau; xi; eta'")
    _add_symbols(p)
    _add_sampling(p)

    p = sub.add_parser("identify", help="identify a Lie algebra from structure constants")
    p.add_argument("--constants", required=True, metavar="FILE", help="JSON with dimension and brackets")
    return parser


def cmd_verify(args, out) -> int:
    entries = load_catalog(args.catalog)
    if args.entry:
        known = {e.id for e in entries}
        missing = [i for i in args.entry if i not in known]
        if missing:
            raise UsageError(f"unknown entry id(s): {', '.join(missing)}")
        entries = [e for e in entries if e.id in set(args.entry)]
    report = verify_all(entries, _ctx(args), jobs=max(1, args.jobs))
    text = emit_report(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK if report.status == "green" else EXIT_MISMATCH


def cmd_residual(args, out) -> int:
    symbols = _symbols(args)
    eq = _equation(args, symbols)
    vf = VectorField.parse(args.tau, args.xi, args.eta, symbols)
    report = verify_symmetry(eq, vf, _ctx(args))
    out.write(f"operator: {vf.operator_text()}\n")
    out.write(f"residual: {render(report.residual)}\n")
    out.write(report.summary() + "\n")
    return EXIT_OK if report.status == VERIFIED else EXIT_MISMATCH


def cmd_defining(args, out) -> int:
    symbols = _symbols(args)
    eq = _equation(args, symbols)
    if args.structured:
        table = SymbolTable({**symbols.functions, "tau": 1, "xi": 1, "h": 1, "r": 2}, symbols.parameters | {"kappa"})
        tau, xi = parse("tau(t)", table), parse("xi(x)", table)
        h = parse("kappa" if eq.form == "L3" else "h(t)", table)
        r = parse("r(t,x)", table)
        if eq.form == "eq1":
            rows = eq1_system(eq.g, eq.f, tau, xi, h, r)
        else:
            rows = [("condition", l3_condition(eq.f, tau, xi, h, r))]
        for name, e in rows:
            out.write(f"{name}: {render(e, args.style)} = 0\n")
        return EXIT_OK
    vf, table = generic_field(symbols)
    eq = EquationSpec(eq.form, eq.f, eq.g, table)
    for mono, coeff in defining_system(eq, vf):
        out.write(f"[{render_monomial(mono)}] {render(coeff, args.style)} = 0\n")
    return EXIT_OK


def cmd_bracket(args, out) -> int:
    symbols = _symbols(args)
    a = VectorField.from_text(args.vf1, symbols)
    b = VectorField.from_text(args.vf2, symbols)
    c = lie_bracket(a, b)
    out.write((c.render("latex") if args.style == "latex" else f"{c.render()}\n{c.operator_text()}") + "\n")
    return EXIT_OK


def cmd_canonical(args, out) -> int:
    symbols = _symbols(args)
    vf = VectorField.from_text(args.vf, symbols)
    label = canonical_label(vf, _ctx(args)) if args.form == "eq1" else canonical_label_L3(vf, _ctx(args))
    out.write(f"{label}\n")
    return EXIT_OK


def cmd_identify(args, out) -> int:
    try:
        with open(args.constants, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.constants}: {exc}") from None
    p = AlgebraPresentation.from_json(data)
    label = identify_class(p)
    out.write(f"{label.name}\n")
    out.write(f"{algebra_invariants(p).summary()}\n")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "residual": cmd_residual,
    "defining": cmd_defining,
    "bracket": cmd_bracket,
    "canonical": cmd_canonical,
    "identify": cmd_identify,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ParseError, CatalogError, StructureError, AxiomError, ValueError, KeyError) as exc:
        print(f"liesym {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
