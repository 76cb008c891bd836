"""Built-in catalog of classified equations, batch verification and reports."""

from __future__ import annotations

import json
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema

from .determine import INCONCLUSIVE, REFUTED, VERIFIED, EquationSpec, VerificationReport, verify_symmetry
from .jet import StructuredField, StructureError, VectorField
from .kernel import Atom, EvalContext, ParseError, ProvablyNonzero, ProvablyZero, differentiate, render
from .kernel.expr import ELEMENTARY, JET_ORDER, VARIABLES
from .kernel.parser import DEFAULT_SYMBOLS, SymbolTable, parse
from .liealg import ClassLabel, ClosureError, DependenceError, identify_class, normalize_label, structure_constants

BUILTIN = "builtin:"
RESIDUAL_CONVENTION = (
    "residual = phi^tx - (tau*g_t + xi*g_x)*u_x - g*phi^x - tau*f_t - xi*f_x - eta*f_u "
    "on u_tx = g*u_x + f; no u_xx terms enter"
)

PASS, INCONCLUSIVE_OUTCOME, FAIL = "pass", "inconclusive", "fail"

_RATIONAL = {"type": ["integer", "string"]}
SCHEMA = {
    "type": "object",
    "required": ["version", "entries"],
    "properties": {
        "version": {"type": "integer", "minimum": 1},
        "symbols": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "arity"],
                "properties": {
                    "name": {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_]*$"},
                    "arity": {"type": "integer", "minimum": 1},
                    "constraints": {"type": "array", "items": {"type": "string"}},
                },
                "additionalProperties": False,
            },
        },
        "parameters": {"$ref": "#/definitions/parameters"},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "form", "f", "generators", "claimed_algebra", "expected_status"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "source": {"type": "string"},
                    "form": {"enum": ["eq1", "L3"]},
                    "g": {"type": "string"},
                    "f": {"type": "string", "minLength": 1},
                    "aliases": {"type": "object", "additionalProperties": {"type": "string"}},
                    "parameters": {"$ref": "#/definitions/parameters"},
                    "generators": {
                        "type": "array",
                        "minItems": 1,
                        "maxItems": 4,
                        "items": {
                            "type": "object",
                            "required": ["tau", "xi", "eta"],
                            "properties": {k: {"type": "string"} for k in ("tau", "xi", "eta")},
                            "additionalProperties": False,
                        },
                    },
                    "claimed_algebra": {"type": "string"},
                    "expected_status": {"enum": [VERIFIED, REFUTED]},
                    "notes": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
    "definitions": {
        "parameters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {"type": "string"},
                    "excluded": {"type": "array", "items": _RATIONAL},
                },
                "additionalProperties": False,
            },
        }
    },
}


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    """One classified equation with its claimed symmetry generators.

    Holds only strings and plain containers so it can cross process
    boundaries; parsed objects are rebuilt on demand.
    """

    id: str
    form: str
    f: str
    generators: tuple  # ((tau, xi, eta), ...)
    claimed_algebra: str
    expected_status: str
    g: str = ""
    source: str = ""
    aliases: tuple = ()  # ((name, text), ...) in file order
    notes: str = ""
    functions: tuple = ()  # ((name, arity), ...)
    parameters: tuple = ()  # ((name, (excluded, ...)), ...)

    def symbol_table(self) -> SymbolTable:
        table = SymbolTable(dict(self.functions), {p for p, _ in self.parameters})
        resolved = {}
        for name in _alias_order(dict(self.aliases), self.id):
            try:
                resolved[name] = parse(dict(self.aliases)[name], table.with_aliases(resolved))
            except ParseError as exc:
                raise CatalogError(f"entry {self.id}: alias {name}: {exc}") from None
        return table.with_aliases(resolved)

    def excluded(self) -> dict:
        return {p: {Fraction(v) for v in vals} for p, vals in self.parameters if vals}

    def equation(self, symbols: SymbolTable | None = None) -> EquationSpec:
        symbols = symbols or self.symbol_table()
        try:
            return EquationSpec.parse(self.form, self.f, self.g or None, symbols, self.excluded())
        except ParseError as exc:
            raise CatalogError(f"entry {self.id}: {exc}") from None

    def fields(self, symbols: SymbolTable | None = None) -> list:
        symbols = symbols or self.symbol_table()
        out = []
        for i, (tau, xi, eta) in enumerate(self.generators):
            try:
                out.append(VectorField.parse(tau, xi, eta, symbols))
            except (ParseError, ValueError) as exc:
                raise CatalogError(f"entry {self.id}: generator {i + 1}: {exc}") from None
        return out

    def check(self):
        """Parse everything and confirm generators have the structured shape."""
        symbols = self.symbol_table()
        self.equation(symbols)
        for i, vf in enumerate(self.fields(symbols)):
            try:
                sf = StructuredField.from_field(vf)
            except StructureError as exc:
                raise CatalogError(f"entry {self.id}: generator {i + 1}: {exc}") from None
            if self.form == "L3" and sf.h.has("t"):
                raise CatalogError(f"entry {self.id}: generator {i + 1}: u coefficient must be constant")


_IDENT = re.compile(r"[^\W\d]\w*", re.UNICODE)


def _alias_order(aliases: dict, entry_id: str) -> list:
    """Aliases sorted so each comes after those it mentions; rejects cycles."""
    order, state = [], {}

    def visit(name, path):
        if state.get(name) == "done":
            return
        if state.get(name) == "active":
            cycle = " -> ".join(path + [name])
            raise CatalogError(f"entry {entry_id}: alias cycle {cycle}")
        state[name] = "active"
        for ref in _IDENT.findall(aliases[name]):
            if ref in aliases:
                visit(ref, path + [name])
        state[name] = "done"
        order.append(name)

    for name in aliases:
        visit(name, [])
    return order


def _read(path: str) -> dict:
    if path == BUILTIN:
        text = resources.files("liesym.data").joinpath("catalog.json").read_text(encoding="utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CatalogError(f"cannot read catalog {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: invalid JSON: {exc}") from None


def load_catalog(path: str = BUILTIN) -> list:
    """Validated entries from a JSON catalog file, or the built-in one."""
    return catalog_from_dict(_read(path), source=path)


def catalog_from_dict(data: dict, source: str = "<data>") -> list:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise CatalogError(f"{source}: schema violation at {where}: {err.message}")
    if "symbols" in data:
        functions = {s["name"]: s["arity"] for s in data["symbols"]}
    else:
        functions = dict(DEFAULT_SYMBOLS.functions)
    if "parameters" in data:
        params = {p["name"]: tuple(str(Fraction(v)) for v in p.get("excluded", ())) for p in data["parameters"]}
    else:
        params = {p: () for p in DEFAULT_SYMBOLS.parameters}
    reserved = set(VARIABLES) | set(JET_ORDER) | set(ELEMENTARY) | {"u"}
    for name in list(functions) + list(params):
        if name in reserved:
            raise CatalogError(f"{source}: symbol name {name!r} is reserved")
    entries, seen = [], set()
    for raw in data["entries"]:
        eid = raw["id"]
        if eid in seen:
            raise CatalogError(f"{source}: duplicate entry id {eid!r}")
        seen.add(eid)
        local = dict(params)
        for p in raw.get("parameters", ()):
            if p["name"] not in params:
                raise CatalogError(f"entry {eid}: unknown parameter {p['name']!r}")
            local[p["name"]] = tuple(sorted({*local[p["name"]], *(str(Fraction(v)) for v in p.get("excluded", ()))}))
        for name in raw.get("aliases", {}):
            if name in reserved or name in functions or name in params:
                raise CatalogError(f"entry {eid}: alias {name!r} shadows a symbol")
        entry = CatalogEntry(
            id=eid,
            form=raw["form"],
            f=raw["f"],
            g=raw.get("g", ""),
            generators=tuple((gen["tau"], gen["xi"], gen["eta"]) for gen in raw["generators"]),
            claimed_algebra=raw["claimed_algebra"],
            expected_status=raw["expected_status"],
            source=raw.get("source", ""),
            aliases=tuple(raw.get("aliases", {}).items()),
            notes=raw.get("notes", ""),
            functions=tuple(sorted(functions.items())),
            parameters=tuple(sorted(local.items())),
        )
        if entry.form == "L3" and entry.g.strip():
            raise CatalogError(f"entry {eid}: u_tx = f entries take no g")
        if entry.form == "eq1" and not entry.g.strip():
            raise CatalogError(f"entry {eid}: u_tx = g u_x + f entries need g")
        entry.check()
        entries.append(entry)
    return entries


# verification


@dataclass
class EntryReport:
    entry: CatalogEntry
    generators: list  # VerificationReport per generator
    observed_status: str
    constants: object = None  # AlgebraPresentation or None
    identified: ClassLabel | None = None
    algebra_error: str = ""
    nondegeneracy: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def status_matches(self) -> bool:
        return self.observed_status == self.entry.expected_status

    @property
    def algebra_matches(self) -> bool:
        return self.identified is not None and self.identified.name == normalize_label(self.entry.claimed_algebra)

    @property
    def numeric_only(self) -> int:
        return sum(r.numeric_only for r in self.generators)

    @property
    def outcome(self) -> str:
        if not self.algebra_matches:
            return FAIL
        if self.observed_status == INCONCLUSIVE:
            return INCONCLUSIVE_OUTCOME
        if not self.status_matches:
            return FAIL
        return PASS


@dataclass
class RunReport:
    entries: list
    seed: int
    sample_count: int
    tolerance: float
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        outcomes = [e.outcome for e in self.entries]
        if FAIL in outcomes:
            return "red"
        if INCONCLUSIVE_OUTCOME in outcomes:
            return "yellow"
        return "green"

    @property
    def totals(self) -> dict:
        outcomes = [e.outcome for e in self.entries]
        return {
            "entries": len(self.entries),
            "pass": outcomes.count(PASS),
            "inconclusive": outcomes.count(INCONCLUSIVE_OUTCOME),
            "fail": outcomes.count(FAIL),
            "generators": sum(len(e.generators) for e in self.entries),
            "numeric_only_coefficients": sum(e.numeric_only for e in self.entries),
        }


def _observed(reports) -> str:
    statuses = [r.status for r in reports]
    if REFUTED in statuses:
        return REFUTED
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return VERIFIED


def verify_entry(entry: CatalogEntry, ctx: EvalContext) -> EntryReport:
    """Check every generator and the algebra they span; failures land in the report."""
    start = time.perf_counter()
    ectx = ctx.spawn(entry.id, entry.excluded())
    symbols = entry.symbol_table()
    eq = entry.equation(symbols)
    fields = entry.fields(symbols)
    reports = [verify_symmetry(eq, vf, ectx) for vf in fields]
    report = EntryReport(entry, reports, _observed(reports))
    try:
        report.constants = structure_constants(fields, ectx)
        report.identified = identify_class(report.constants)
    except (ClosureError, DependenceError, ArithmeticError) as exc:
        report.algebra_error = str(exc)
    for name, verdict in eq.nondegeneracy(ectx).items():
        report.nondegeneracy[name] = verdict.describe()
        if not isinstance(verdict, ProvablyNonzero):
            report.warnings.append(f"nondegeneracy {name} != 0 not confirmed: {verdict.describe()}")
    if report.numeric_only:
        report.warnings.append(f"{report.numeric_only} coefficient(s) accepted on numeric evidence only")
    if report.identified is not None and not report.algebra_matches:
        report.warnings.append(f"identified {report.identified} but claimed {entry.claimed_algebra}")
    report.elapsed = time.perf_counter() - start
    return report


def _task(args):
    entry, seed, samples, tol = args
    return verify_entry(entry, EvalContext(seed, samples, tol))


def verify_all(entries, ctx: EvalContext | None = None, jobs: int = 1) -> RunReport:
    """Verify entries, optionally across processes; results depend only on the seed."""
    ctx = ctx or EvalContext()
    start = time.perf_counter()
    tasks = [(e, ctx.seed, ctx.sample_count, ctx.tolerance) for e in entries]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    return RunReport(results, ctx.seed, ctx.sample_count, ctx.tolerance, time.perf_counter() - start)


# reports


def _operator(gen: VectorField) -> str:
    return gen.operator_text()


def _nonzero_items(rep: VerificationReport) -> list:
    items = []
    for mono, coeff, verdict in rep.entries:
        if isinstance(verdict, ProvablyNonzero):
            items.append(
                {
                    "monomial": mono,
                    "coefficient": render(coeff),
                    "witness": {k: str(v) for k, v in sorted(verdict.witness.items())},
                    "value": f"{verdict.value:.12g}",
                }
            )
    return items


def entry_to_json(rep: EntryReport) -> dict:
    fields = rep.entry.fields()
    gens = []
    for vf, r in zip(fields, rep.generators):
        gens.append(
            {
                "operator": _operator(vf),
                "status": r.status,
                "numeric_only": r.numeric_only,
                "provably_zero": r.provably_zero,
                "nonzero": _nonzero_items(r),
            }
        )
    return {
        "id": rep.entry.id,
        "source": rep.entry.source,
        "form": rep.entry.form,
        "outcome": rep.outcome,
        "expected_status": rep.entry.expected_status,
        "observed_status": rep.observed_status,
        "claimed_algebra": rep.entry.claimed_algebra,
        "identified_algebra": rep.identified.name if rep.identified else None,
        "algebra_detail": rep.identified.detail if rep.identified else rep.algebra_error,
        "structure_constants": rep.constants.to_json()["brackets"] if rep.constants is not None else None,
        "generators": gens,
        "nondegeneracy": rep.nondegeneracy,
        "warnings": rep.warnings,
        "notes": rep.entry.notes,
    }


def report_to_json(report: RunReport) -> dict:
    return {
        "entries": [entry_to_json(e) for e in report.entries],
        "status": report.status,
        "seed": report.seed,
        "samples": report.sample_count,
        "tolerance": report.tolerance,
        "totals": report.totals,
        "residual_convention": RESIDUAL_CONVENTION,
    }


def _text(report: RunReport) -> str:
    lines = [
        f"seed {report.seed}, {report.sample_count} samples, tolerance {report.tolerance:g}",
        RESIDUAL_CONVENTION,
        "",
    ]
    for rep in report.entries:
        ident = rep.identified.name if rep.identified else f"error ({rep.algebra_error})"
        lines.append(
            f"{rep.entry.id:<22} {rep.outcome.upper():<12} {rep.observed_status} (expected {rep.entry.expected_status}); "
            f"algebra {ident} (claimed {rep.entry.claimed_algebra})"
        )
        for vf, r in zip(rep.entry.fields(), rep.generators):
            if r.status == VERIFIED and not r.numeric_only:
                continue
            lines.append(f"    generator {_operator(vf)}: {r.status}")
            for mono, coeff, verdict in r.entries:
                if isinstance(verdict, ProvablyZero):
                    continue
                lines.append(f"      coefficient of {mono}: {render(coeff)} -> {verdict.describe()}")
        for w in rep.warnings:
            lines.append(f"    warning: {w}")
        if rep.entry.notes and rep.observed_status != VERIFIED:
            lines.append(f"    note: {rep.entry.notes}")
    t = report.totals
    lines.append("")
    lines.append(
        f"{t['entries']} entries: {t['pass']} pass, {t['inconclusive']} inconclusive, {t['fail']} fail; "
        f"{t['numeric_only_coefficients']} numeric-only coefficient(s); status {report.status}"
    )
    return "\n".join(lines) + "\n"


def _latex_f(entry: CatalogEntry) -> str:
    table = SymbolTable(dict(entry.functions), {p for p, _ in entry.parameters} | {a for a, _ in entry.aliases})
    parts = []
    if entry.form == "eq1":
        parts.append("g = " + render(parse(entry.g, table), "latex"))
        parts.append("f = " + render(parse(entry.f, table), "latex"))
    else:
        parts.append(render(parse(entry.f, table), "latex"))
    for name, text in entry.aliases:
        parts.append(f"{render(Atom(name), 'latex')} = {render(parse(text, table), 'latex')}")
    return "$" + ",\\ ".join(parts) + "$"


def _latex(report: RunReport) -> str:
    lines = [
        r"\begin{tabular}{|l|c|c|c|c|c|}\hline",
        r"Number & Function $f$ & Symmetry operator & Algebra & Observed & Check \\ \hline",
    ]
    for rep in report.entries:
        ops = ", ".join(f"${vf.render('latex')}$" for vf in rep.entry.fields())
        check = {PASS: "PASS", FAIL: "FAIL", INCONCLUSIVE_OUTCOME: "INCONCLUSIVE"}[rep.outcome]
        algebra = rep.entry.claimed_algebra.replace("+", r"$\oplus$")
        lines.append(
            f"{rep.entry.id} & {_latex_f(rep.entry)} & {ops} & {algebra} & {rep.observed_status} & {check} \\\\ \\hline"
        )
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report_to_json(report), indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        return _text(report)
    if fmt == "latex":
        return _latex(report)
    raise ValueError(f"unknown report format {fmt!r}")


def derivative_checks(entry: CatalogEntry) -> dict:
    """f_uu and, for u_tx = g u_x + f, g_x as expressions (for display)."""
    eq = entry.equation()
    out = {"f_uu": differentiate(differentiate(eq.f, "u"), "u")}
    if eq.form == "eq1":
        out["g_x"] = differentiate(eq.g, "x")
    return out
