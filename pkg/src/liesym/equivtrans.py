"""Equivalence transformations of the equation classes and canonical operator labels."""

from __future__ import annotations

from dataclasses import dataclass

from .determine import EquationSpec
from .jet import StructuredField, VectorField, total_derivative
from .kernel import (
    ONE,
    ZERO,
    Atom,
    EvalContext,
    Expr,
    NonPolynomialError,
    ProvablyNonzero,
    add,
    cleared_form,
    collect_coefficients,
    differentiate,
    expand,
    fn,
    is_zero,
    mul,
    normalize,
    power,
    render,
    substitute,
)
from .kernel.expr import MINUS_ONE

KINDS = ("type1", "type2")


class TransformError(ValueError):
    """Invalid transform, or a transformed equation that leaves its class."""


def _nonzero(e: Expr, ctx: EvalContext) -> bool:
    return isinstance(is_zero(e, ctx), ProvablyNonzero)


@dataclass(frozen=True)
class PointTransform:
    """New coordinates (t', x', v) as functions of the old (t, x, u).

    type1: t' = T(t), x' = X(x), v = U(t) u + Y(t, x).
    type2: t' = T(x), x' = X(t), v = Psi(x) exp(-G(t, x)) u + Y(t, x), where G
    is a caller-supplied antiderivative of g in t.

    ``T_inv`` and ``X_inv`` express the old coordinates through the new ones,
    written with the atoms t (for t') and x (for x').  For type1 they give the
    old t and x; for type2, T_inv gives the old x and X_inv the old t.
    """

    kind: str
    T: Expr
    X: Expr
    U: Expr = ONE
    Y: Expr = ZERO
    Psi: Expr = ONE
    G: Expr = ZERO
    T_inv: Expr | None = None
    X_inv: Expr | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TransformError(f"kind must be one of {KINDS}")
        tvar, xvar = self._sources
        if self.T.has("u") or self.T.has(xvar):
            raise TransformError(f"T must depend on {tvar} only: {render(self.T)}")
        if self.X.has("u") or self.X.has(tvar):
            raise TransformError(f"X must depend on {xvar} only: {render(self.X)}")
        if self.U.has("x", "u"):
            raise TransformError(f"U must depend on t only: {render(self.U)}")
        if self.Psi.has("t", "u"):
            raise TransformError(f"Psi must depend on x only: {render(self.Psi)}")
        if self.Y.has("u") or self.G.has("u"):
            raise TransformError("Y and G must not depend on u")
        for name, d in (("T'", differentiate(self.T, tvar)), ("X'", differentiate(self.X, xvar))):
            if cleared_form(d).is_zero:
                raise TransformError(f"{name} vanishes identically")
        if cleared_form(self.multiplier).is_zero:
            raise TransformError("the multiplier of u vanishes identically")

    @property
    def _sources(self) -> tuple:
        """Old variables that T and X depend on."""
        return ("t", "x") if self.kind == "type1" else ("x", "t")

    @property
    def multiplier(self) -> Expr:
        if self.kind == "type1":
            return self.U
        return mul(self.Psi, fn("exp", mul(MINUS_ONE, self.G)))

    @property
    def is_l3_compatible(self) -> bool:
        """Multiplier is a nonzero constant, as required for u_tx = f."""
        return not self.multiplier.atoms - {"m", "k", "n", "lambda", "epsilon"} and self.G.is_zero

    @property
    def has_inverse(self) -> bool:
        return self.T_inv is not None and self.X_inv is not None

    def new_coordinates(self) -> tuple:
        """(t', x', v) as expressions in the old coordinates."""
        return self.T, self.X, add(mul(self.multiplier, Atom("u")), self.Y)

    def old_coordinates(self) -> dict:
        """Bindings t, x, u -> expressions in the new coordinates."""
        if not self.has_inverse:
            raise TransformError("inverse maps are required to rewrite in new coordinates")
        if self.kind == "type1":
            base = {"t": self.T_inv, "x": self.X_inv}
        else:
            base = {"x": self.T_inv, "t": self.X_inv}
        m = substitute(self.multiplier, base)
        y = substitute(self.Y, base)
        base["u"] = mul(add(Atom("u"), mul(MINUS_ONE, y)), power(m, MINUS_ONE))
        return base

    def to_new(self, e: Expr) -> Expr:
        """Rewrite an expression in old coordinates through the new ones."""
        return substitute(e, self.old_coordinates())

    def check_inverses(self, ctx: EvalContext) -> dict:
        """Zero verdicts for T(T_inv(s)) - s and X(X_inv(s)) - s."""
        if not self.has_inverse:
            raise TransformError("no inverse maps supplied")
        tvar, xvar = self._sources
        return {
            "T": is_zero(add(substitute(self.T, {tvar: self.T_inv}), -Atom("t")), ctx),
            "X": is_zero(add(substitute(self.X, {xvar: self.X_inv}), -Atom("x")), ctx),
        }

    def check_antiderivative(self, g: Expr, ctx: EvalContext):
        """Zero verdict for dG/dt - g."""
        return is_zero(add(differentiate(self.G, "t"), -g), ctx)


IDENTITY = PointTransform("type1", Atom("t"), Atom("x"), T_inv=Atom("t"), X_inv=Atom("x"))


def swap(m: Expr = ONE, Y: Expr = ZERO) -> PointTransform:
    """t' = x, x' = t, v = m u + Y."""
    return PointTransform("type2", Atom("x"), Atom("t"), Y=Y, Psi=m, T_inv=Atom("t"), X_inv=Atom("x"))


def pushforward(tr: PointTransform, vf, rewrite: bool = False) -> VectorField:
    """Image of a point field: each new coordinate differentiated along the field.

    For a structured field and a type1 transform this is
    tau T' d_t' + xi X' d_x' + ((tau U' + U h) u + tau Y_t + xi Y_x + U r) d_v.
    With ``rewrite`` the coefficients are expressed in the new coordinates.
    """
    if isinstance(vf, StructuredField):
        vf = vf.field
    out = VectorField(*(vf.apply(c) for c in tr.new_coordinates()))
    if rewrite:
        out = out.map(tr.to_new)
    return out


def _jet_part(e: Expr) -> dict:
    return collect_coefficients(e, ("u_t", "u_x", "u_tt", "u_xx"))


def transform_equation(tr: PointTransform, eq: EquationSpec, ctx: EvalContext | None = None) -> EquationSpec:
    """The equation satisfied by v(t', x') when u solves ``eq``.

    Derived by the chain rule: D_t' and D_x' are expressed through D_t, D_x
    with the inverse Jacobian, v_t'x' is reduced on the original equation and
    then split against v_x'.  The result must lie in the same class.
    """
    ctx = ctx or EvalContext()
    Tn, Xn, v = tr.new_coordinates()
    # (D_t, D_x) = J^T (D_t', D_x') with J = d(t', x')/d(t, x)
    a, b = differentiate(Tn, "t"), differentiate(Tn, "x")
    c, d = differentiate(Xn, "t"), differentiate(Xn, "x")
    det_inv = power(add(mul(a, d), mul(MINUS_ONE, b, c)), MINUS_ONE)

    def d_new(e: Expr, which: str) -> Expr:
        dt, dx = total_derivative(e, "t"), total_derivative(e, "x")
        if which == "t":
            return mul(det_inv, add(mul(d, dt), mul(MINUS_ONE, c, dx)))
        return mul(det_inv, add(mul(a, dx), mul(MINUS_ONE, b, dt)))

    v_x = normalize(d_new(v, "x"))
    v_t = normalize(d_new(v, "t"))
    if v_t.has("u_tt", "u_tx", "u_xx") or v_x.has("u_tt", "u_tx", "u_xx"):
        raise TransformError("first derivatives of v involve second-order jets")
    v_tx = d_new(v_t, "x")
    reduced = substitute(v_tx, {"u_tx": add(mul(eq.g, Atom("u_x")), eq.f)})
    try:
        lhs = _jet_part(reduced)
        grad = _jet_part(v_x)
    except NonPolynomialError as exc:
        raise TransformError(str(exc)) from None
    pivot = next((m for m in grad if m), None)
    if pivot is None:
        raise TransformError("v_x' carries no first-order jet")
    g_new = mul(lhs.get(pivot, ZERO), power(grad[pivot], MINUS_ONE))
    for mono in set(lhs) | set(grad):
        if not mono:
            continue
        rest = add(lhs.get(mono, ZERO), mul(MINUS_ONE, g_new, grad.get(mono, ZERO)))
        if _nonzero(rest, ctx):
            raise TransformError(f"transformed equation leaves the class: {render(rest)} multiplies {mono}")
    f_new = add(lhs.get((), ZERO), mul(MINUS_ONE, g_new, grad.get((), ZERO)))
    if tr.has_inverse:
        g_new, f_new = tr.to_new(g_new), tr.to_new(f_new)
        if _nonzero(differentiate(g_new, "u"), ctx):
            raise TransformError(f"new g depends on v: {render(g_new)}")
    if eq.form == "L3":
        if _nonzero(g_new, ctx):
            raise TransformError(f"u_tx = f maps to an equation with a u_x term: {render(g_new)}")
        return EquationSpec("L3", normalize(f_new), ZERO, eq.symbols, eq.excluded)
    if g_new.has("u"):
        g_new = substitute(g_new, {"u": ZERO})
    return EquationSpec("eq1", normalize(f_new), expand(g_new), eq.symbols, eq.excluded)


# canonical forms

EQ1_FORMS = {
    "D": "t*Dt + x*Dx",
    "Tt": "Dt",
    "Xtu": "Dx + t*u*Du",
    "Xe": "Dx + epsilon*u*Du",
    "TU": "t*u*Du",
    "U": "u*Du",
    "R": "r(t,x)*Du",
}
L3_FORMS = {
    "TXe": "Dt + Dx + epsilon*u*Du",
    "Te": "Dt + epsilon*u*Du",
    "U": "u*Du",
    "G": "g(t,x)*Du",
}


@dataclass(frozen=True)
class CanonicalForm:
    label: str
    epsilon: int | None = None
    form: str = "eq1"

    @property
    def operator(self) -> str:
        table = EQ1_FORMS if self.form == "eq1" else L3_FORMS
        text = table[self.label]
        if self.epsilon == 0:
            text = text.replace(" + epsilon*u*Du", "")
        elif self.epsilon == 1:
            text = text.replace("epsilon*", "")
        return text

    def __str__(self) -> str:
        eps = f", epsilon={self.epsilon}" if self.epsilon is not None else ""
        return f"{self.label}{eps}: {self.operator}"


def _as_structured(vf) -> StructuredField:
    return vf if isinstance(vf, StructuredField) else StructuredField.from_field(vf)


def canonical_label(vf, ctx: EvalContext | None = None) -> CanonicalForm:
    """Canonical class of a structured operator of u_tx = g u_x + f."""
    ctx = ctx or EvalContext()
    sf = _as_structured(vf)
    tau, xi = _nonzero(sf.tau, ctx), _nonzero(sf.xi, ctx)
    h, h_prime = _nonzero(sf.h, ctx), _nonzero(differentiate(sf.h, "t"), ctx)
    if tau and xi:
        return CanonicalForm("D")
    if tau:
        return CanonicalForm("Tt")
    if xi:
        return CanonicalForm("Xtu") if h_prime else CanonicalForm("Xe", int(h))
    if h_prime:
        return CanonicalForm("TU")
    if h:
        return CanonicalForm("U")
    if _nonzero(sf.r, ctx):
        return CanonicalForm("R")
    raise ValueError("the zero field has no canonical form")


def canonical_label_L3(vf, ctx: EvalContext | None = None) -> CanonicalForm:
    """Canonical class of a structured operator of u_tx = f (h must be a constant k)."""
    ctx = ctx or EvalContext()
    sf = _as_structured(vf)
    if sf.h.has("t", "x"):
        raise ValueError(f"the u coefficient must be constant for u_tx = f: {render(sf.h)}")
    tau, xi, k = _nonzero(sf.tau, ctx), _nonzero(sf.xi, ctx), _nonzero(sf.h, ctx)
    if tau and xi:
        return CanonicalForm("TXe", int(k), "L3")
    if tau or xi:
        return CanonicalForm("Te", int(k), "L3")
    if k:
        return CanonicalForm("U", None, "L3")
    if _nonzero(sf.r, ctx):
        return CanonicalForm("G", None, "L3")
    raise ValueError("the zero field has no canonical form")
