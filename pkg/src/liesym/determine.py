"""Invariance residuals, defining systems and symmetry verification."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .jet import StructuredField, VectorField, prolong2
from .kernel import (
    ZERO,
    Atom,
    EvalContext,
    Expr,
    ProvablyNonzero,
    ProvablyZero,
    add,
    collect_coefficients,
    differentiate,
    is_zero,
    mul,
    normalize,
    render,
    render_monomial,
    substitute,
)
from .kernel.parser import DEFAULT_SYMBOLS, SymbolTable, parse

FORMS = ("eq1", "L3")
JET_BASIS = ("u_t", "u_x", "u_tt", "u_xx")

VERIFIED = "Verified"
REFUTED = "Refuted"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class EquationSpec:
    """u_tx = g(t,x) u_x + f(t,x,u) (form "eq1") or u_tx = f(t,x,u) (form "L3")."""

    form: str
    f: Expr
    g: Expr = ZERO
    symbols: SymbolTable = field(default=DEFAULT_SYMBOLS, compare=False)
    excluded: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}, not {self.form!r}")
        if self.form == "L3" and not self.g.is_zero:
            raise ValueError("the u_tx = f form carries no g")
        if self.g.has("u", "u_t", "u_x", "u_tt", "u_tx", "u_xx"):
            raise ValueError(f"g must be a function of (t, x) only: {render(self.g)}")
        if self.f.has("u_t", "u_x", "u_tt", "u_tx", "u_xx"):
            raise ValueError(f"f must not contain derivatives of u: {render(self.f)}")

    @classmethod
    def parse(cls, form: str, f: str, g: str | None = None, symbols: SymbolTable | None = None, excluded=None):
        symbols = symbols or DEFAULT_SYMBOLS
        g_expr = parse(g, symbols) if g else ZERO
        return cls(form, parse(f, symbols), g_expr, symbols, dict(excluded or {}))

    def nondegeneracy(self, ctx: EvalContext) -> dict:
        """Verdicts for f_uu (and g_x for eq1); each must not vanish identically."""
        out = {"f_uu": is_zero(differentiate(differentiate(self.f, "u"), "u"), ctx)}
        if self.form == "eq1":
            out["g_x"] = is_zero(differentiate(self.g, "x"), ctx)
        return out


@dataclass
class VerificationReport:
    """Per-coefficient zero verdicts for one (equation, field) pair."""

    entries: list  # (monomial text, coefficient Expr, ZeroVerdict)
    seed: int
    elapsed: float = 0.0
    residual: Expr | None = None

    @property
    def status(self) -> str:
        verdicts = [v for _, _, v in self.entries]
        if any(isinstance(v, ProvablyNonzero) for v in verdicts):
            return REFUTED
        if all(v.decided for v in verdicts):
            return VERIFIED
        return INCONCLUSIVE

    @property
    def numeric_only(self) -> int:
        """Number of coefficients accepted on numeric evidence alone."""
        return sum(1 for _, _, v in self.entries if not isinstance(v, (ProvablyZero, ProvablyNonzero)))

    @property
    def provably_zero(self) -> bool:
        return all(isinstance(v, ProvablyZero) for _, _, v in self.entries)

    @property
    def offending(self) -> list:
        return [(m, c, v) for m, c, v in self.entries if isinstance(v, ProvablyNonzero)]

    def summary(self) -> str:
        lines = [f"status: {self.status}"]
        for mono, coeff, verdict in self.entries:
            lines.append(f"  [{mono}] {render(coeff)} : {verdict.describe()}")
        return "\n".join(lines)


def invariance_residual(eq: EquationSpec, vf: VectorField) -> Expr:
    """pr^(2) vf applied to u_tx - g u_x - f, restricted to the equation manifold."""
    pr = prolong2(vf)
    tau, xi, eta = vf.components
    g, f = eq.g, eq.f
    u_x = Atom("u_x")
    residual = add(
        pr.phi_tx,
        -mul(add(mul(tau, differentiate(g, "t")), mul(xi, differentiate(g, "x"))), u_x),
        -mul(g, pr.phi_x),
        -mul(tau, differentiate(f, "t")),
        -mul(xi, differentiate(f, "x")),
        -mul(eta, differentiate(f, "u")),
    )
    return normalize(substitute(residual, {"u_tx": add(mul(g, u_x), f)}))


def defining_system(eq: EquationSpec, vf: VectorField) -> list:
    """Split the residual by jet monomials: [(monomial, coefficient), ...]."""
    coeffs = collect_coefficients(invariance_residual(eq, vf), JET_BASIS)
    return list(coeffs.items())


def _report(named_exprs, ctx: EvalContext, residual=None) -> VerificationReport:
    start = time.perf_counter()
    entries = [(name, e, is_zero(e, ctx)) for name, e in named_exprs]
    return VerificationReport(entries, ctx.seed, time.perf_counter() - start, residual)


def verify_symmetry(eq: EquationSpec, vf: VectorField, ctx: EvalContext) -> VerificationReport:
    residual = invariance_residual(eq, vf)
    system = collect_coefficients(residual, JET_BASIS)
    named = [(render_monomial(m), c) for m, c in system.items()]
    if not named:
        named = [("1", ZERO)]
    return _report(named, ctx, residual)


def eq1_system(g, f, tau, xi, h, r) -> list:
    """Both equations of the reduced system for the structured field, as residuals.

    r_tx + f (h - tau_t - xi_x) - g r_x - tau f_t - xi f_x - (h u + r) f_u
    h_t - tau_t g - tau g_t - xi g_x
    """
    d = differentiate
    u = Atom("u")
    first = add(
        d(d(r, "t"), "x"),
        mul(f, add(h, -d(tau, "t"), -d(xi, "x"))),
        -mul(g, d(r, "x")),
        -mul(tau, d(f, "t")),
        -mul(xi, d(f, "x")),
        -mul(add(mul(h, u), r), d(f, "u")),
    )
    second = add(d(h, "t"), -mul(d(tau, "t"), g), -mul(tau, d(g, "t")), -mul(xi, d(g, "x")))
    return [("constant part", first), ("u_x part", second)]


def check_eq1_system(g, f, tau, xi, h, r, ctx: EvalContext) -> VerificationReport:
    """Zero-test the reduced two-equation system for u_tx = g u_x + f."""
    if tau.has("x", "u") or xi.has("t", "u") or h.has("x", "u") or r.has("u"):
        raise ValueError("expected tau(t), xi(x), h(t), r(t,x)")
    return _report(eq1_system(g, f, tau, xi, h, r), ctx)


def l3_condition(f, tau, xi, k, r) -> Expr:
    """r_tx + (k - tau' - xi') f - tau f_t - xi f_x - (k u + r) f_u."""
    d = differentiate
    u = Atom("u")
    return add(
        d(d(r, "t"), "x"),
        mul(add(k, -d(tau, "t"), -d(xi, "x")), f),
        -mul(tau, d(f, "t")),
        -mul(xi, d(f, "x")),
        -mul(add(mul(k, u), r), d(f, "u")),
    )


def check_l3_condition(f, tau, xi, k, r, ctx: EvalContext) -> VerificationReport:
    """Zero-test the single reduced condition for u_tx = f."""
    if tau.has("x", "u") or xi.has("t", "u") or k.has("t", "x", "u") or r.has("u"):
        raise ValueError("expected tau(t), xi(x), constant k, r(t,x)")
    return _report([("condition", l3_condition(f, tau, xi, k, r))], ctx)


def check_structured(eq: EquationSpec, sf: StructuredField, ctx: EvalContext) -> VerificationReport:
    """Route a structured field through the reduced system matching ``eq.form``."""
    if eq.form == "eq1":
        return check_eq1_system(eq.g, eq.f, sf.tau, sf.xi, sf.h, sf.r, ctx)
    return check_l3_condition(eq.f, sf.tau, sf.xi, sf.h, sf.r, ctx)


def generic_field(symbols: SymbolTable | None = None) -> tuple[VectorField, SymbolTable]:
    """Field with uninterpreted coefficients tau(t,x,u), xi(t,x,u), eta(t,x,u)."""
    base = symbols or DEFAULT_SYMBOLS
    table = SymbolTable({**base.functions, "tau": 3, "xi": 3, "eta": 3}, set(base.parameters), dict(base.aliases))
    vf = VectorField.parse("tau(t,x,u)", "xi(t,x,u)", "eta(t,x,u)", table)
    return vf, table


def generic_equation(form: str = "eq1") -> tuple[EquationSpec, SymbolTable]:
    """Equation with uninterpreted g(t,x) and f(t,x,u)."""
    table = SymbolTable({"g": 2, "f": 3}, set(), {})
    if form == "eq1":
        return EquationSpec.parse("eq1", "f(t,x,u)", "g(t,x)", table), table
    return EquationSpec.parse("L3", "f(t,x,u)", None, table), table
