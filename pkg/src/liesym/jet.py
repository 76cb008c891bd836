"""Total derivatives on the second-order jet space, prolongation, brackets."""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import MINUS_ONE, ZERO, Add, Atom, Expr, add, as_expr, differentiate, mul, parse, render, substitute
from .kernel.calculus import cleared_form
from .kernel.parser import SymbolTable

U = Atom("u")
_SECOND_ORDER = ("u_tt", "u_tx", "u_xx")
# D_dir = d/d(dir) + sum over (atom, its derivative in dir)
_CHAIN = {
    "t": (("u", "u_t"), ("u_t", "u_tt"), ("u_x", "u_tx")),
    "x": (("u", "u_x"), ("u_t", "u_tx"), ("u_x", "u_xx")),
}


class JetOrderError(ValueError):
    """A total derivative would need a third-order jet coordinate."""


class StructureError(ValueError):
    """A vector field does not have the structured (restricted) shape."""


def total_derivative(e: Expr, direction: str) -> Expr:
    """D_t or D_x of ``e`` on the jet space truncated at order two."""
    if direction not in _CHAIN:
        raise ValueError(f"direction must be 't' or 'x', not {direction!r}")
    if e.has(*_SECOND_ORDER):
        raise JetOrderError(f"D_{direction} of an expression containing second-order jets")
    terms = [differentiate(e, direction)]
    for name, image in _CHAIN[direction]:
        if name in e.atoms:
            terms.append(mul(Atom(image), differentiate(e, name)))
    return add(*terms)


@dataclass(frozen=True)
class VectorField:
    """tau*d_t + xi*d_x + eta*d_u with coefficients over (t, x, u)."""

    tau: Expr
    xi: Expr
    eta: Expr

    def __post_init__(self):
        for c in (self.tau, self.xi, self.eta):
            if c.has("u_t", "u_x", *_SECOND_ORDER):
                raise ValueError("vector field coefficients must not contain jet variables")

    @classmethod
    def parse(cls, tau: str, xi: str, eta: str, symbols: SymbolTable | None = None) -> "VectorField":
        return cls(parse(tau, symbols), parse(xi, symbols), parse(eta, symbols))

    @classmethod
    def from_text(cls, text: str, symbols: SymbolTable | None = None) -> "VectorField":
        """Parse ``"tau; xi; eta"``."""
        parts = text.split(";")
        if len(parts) != 3:
            raise ValueError(f"expected 'tau; xi; eta', got {text!r}")
        return cls.parse(*parts, symbols=symbols)

    @property
    def components(self) -> tuple:
        return (self.tau, self.xi, self.eta)

    def apply(self, f: Expr) -> Expr:
        """Action of the field as a derivation on functions of (t, x, u)."""
        return add(
            mul(self.tau, differentiate(f, "t")),
            mul(self.xi, differentiate(f, "x")),
            mul(self.eta, differentiate(f, "u")),
        )

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(add(self.tau, other.tau), add(self.xi, other.xi), add(self.eta, other.eta))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scale(-1)

    def scale(self, c) -> "VectorField":
        c = as_expr(c)
        return VectorField(mul(c, self.tau), mul(c, self.xi), mul(c, self.eta))

    def map(self, fn) -> "VectorField":
        return VectorField(fn(self.tau), fn(self.xi), fn(self.eta))

    @property
    def is_structurally_zero(self) -> bool:
        return all(cleared_form(c).is_zero for c in self.components)

    def render(self, style: str = "plain") -> str:
        if style == "plain":
            return "; ".join(render(c) for c in self.components)
        parts = []
        for coeff, d in zip(self.components, (r"\partial_t", r"\partial_x", r"\partial_u")):
            if coeff.is_zero:
                continue
            text = render(coeff, "latex")
            if text == "1":
                parts.append(d)
            elif text == "-1":
                parts.append("-" + d)
            else:
                parts.append(f"({text}){d}" if isinstance(coeff, Add) else f"{text}{d}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def operator_text(self) -> str:
        """Human form such as ``t*Dt + x*Dx``."""
        parts = []
        for coeff, d in zip(self.components, ("Dt", "Dx", "Du")):
            if coeff.is_zero:
                continue
            text = render(coeff)
            if text == "1":
                parts.append(d)
            elif text == "-1":
                parts.append("-" + d)
            else:
                parts.append(f"({text})*{d}" if isinstance(coeff, Add) else f"{text}*{d}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


ZERO_FIELD = VectorField(ZERO, ZERO, ZERO)


@dataclass(frozen=True)
class StructuredField:
    """tau(t)*d_t + xi(x)*d_x + (h(t)*u + r(t,x))*d_u."""

    tau: Expr
    xi: Expr
    h: Expr
    r: Expr

    @property
    def field(self) -> VectorField:
        return VectorField(self.tau, self.xi, add(mul(self.h, U), self.r))

    @classmethod
    def from_field(cls, vf: VectorField) -> "StructuredField":
        """Recover the structured view; raises StructureError if vf lacks the shape."""
        if vf.tau.has("x", "u"):
            raise StructureError(f"tau must depend on t only: {render(vf.tau)}")
        if vf.xi.has("t", "u"):
            raise StructureError(f"xi must depend on x only: {render(vf.xi)}")
        h = differentiate(vf.eta, "u")
        if h.has("u"):
            raise StructureError(f"eta must be linear in u: {render(vf.eta)}")
        if h.has("x"):
            raise StructureError(f"u-coefficient of eta must depend on t only: {render(h)}")
        r = substitute(vf.eta, {"u": ZERO})
        return cls(vf.tau, vf.xi, h, r)


@dataclass(frozen=True)
class ProlongedField:
    phi_t: Expr
    phi_x: Expr
    phi_tt: Expr
    phi_tx: Expr
    phi_xx: Expr


def prolong2(vf: VectorField) -> ProlongedField:
    """Second prolongation coefficients of a point vector field."""
    tau, xi, eta = vf.components
    u_t, u_x = Atom("u_t"), Atom("u_x")
    u_tt, u_tx, u_xx = Atom("u_tt"), Atom("u_tx"), Atom("u_xx")
    dt_tau, dx_tau = total_derivative(tau, "t"), total_derivative(tau, "x")
    dt_xi, dx_xi = total_derivative(xi, "t"), total_derivative(xi, "x")
    phi_t = add(total_derivative(eta, "t"), mul(MINUS_ONE, u_t, dt_tau), mul(MINUS_ONE, u_x, dt_xi))
    phi_x = add(total_derivative(eta, "x"), mul(MINUS_ONE, u_t, dx_tau), mul(MINUS_ONE, u_x, dx_xi))
    phi_tt = add(total_derivative(phi_t, "t"), -(u_tt * dt_tau), -(u_tx * dt_xi))
    phi_tx = add(total_derivative(phi_t, "x"), -(u_tt * dx_tau), -(u_tx * dx_xi))
    phi_xx = add(total_derivative(phi_x, "x"), -(u_tx * dx_tau), -(u_xx * dx_xi))
    return ProlongedField(phi_t, phi_x, phi_tt, phi_tx, phi_xx)


def lie_bracket(a: VectorField, b: VectorField) -> VectorField:
    """[a, b], each component a(b_i) - b(a_i)."""
    return VectorField(*(add(a.apply(cb), -b.apply(ca)) for ca, cb in zip(a.components, b.components)))
