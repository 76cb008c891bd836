"""Plain-text and LaTeX printing of expression trees."""

from __future__ import annotations

from fractions import Fraction

from .expr import Add, Atom, Call, Const, Expr, Fn, Mul, Pow, integer_value, split_coeff

_GREEK = {
    "lambda": r"\lambda",
    "epsilon": r"\varepsilon",
    "eps": r"\varepsilon",
    "omega": r"\omega",
    "theta": r"\theta",
    "mu": r"\mu",
    "kappa": r"\kappa",
}


def render(e: Expr, style: str = "plain") -> str:
    if style == "plain":
        return _plain(e)
    if style == "latex":
        return _latex(e)
    raise ValueError(f"unknown render style {style!r}")


def _frac_plain(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _plain(e: Expr) -> str:
    if isinstance(e, Const):
        return _frac_plain(e.value)
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Add):
        return _join_sum(e, _plain)
    if isinstance(e, Mul):
        c, rest = split_coeff(e)
        factors = rest.factors if isinstance(rest, Mul) else (rest,)
        body = "*".join(_plain_factor(f) for f in factors)
        if c == 1:
            return body
        if c == -1:
            return "-" + body
        return f"{_frac_plain(c)}*{body}"
    if isinstance(e, Pow):
        return _plain_pow(e)
    if isinstance(e, Fn):
        return f"{e.name}({_plain(e.arg)})"
    if isinstance(e, Call):
        args = ", ".join(_plain(a) for a in e.args)
        if any(e.derivs):
            return f"{e.name}{{{','.join(map(str, e.derivs))}}}({args})"
        return f"{e.name}({args})"
    raise TypeError(type(e))


def _plain_factor(f: Expr) -> str:
    if isinstance(f, Add):
        return f"({_plain(f)})"
    return _plain(f)


def _plain_pow(e: Pow) -> str:
    b = e.base
    if isinstance(b, (Add, Mul, Pow)) or (isinstance(b, Const) and (b.value < 0 or b.value.denominator != 1)):
        base = f"({_plain(b)})"
    else:
        base = _plain(b)
    n = integer_value(e.exp)
    if n is not None:
        return f"{base}^{n}"
    if isinstance(e.exp, Atom):
        return f"{base}^{e.exp.name}"
    return f"{base}^({_plain(e.exp)})"


def _join_sum(e: Add, printer, spaced: bool = True) -> str:
    plus, minus = (" + ", " - ") if spaced else ("+", "-")
    out = []
    for i, term in enumerate(e.terms):
        c, _ = split_coeff(term)
        if c < 0:
            out.append(("-" if i == 0 else minus) + printer(-term))
        else:
            out.append(("" if i == 0 else plus) + printer(term))
    return "".join(out)


def _frac_latex(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    sign = "-" if v < 0 else ""
    return f"{sign}\\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"


def _latex_atom(name: str) -> str:
    if name in _GREEK:
        return _GREEK[name]
    if name.startswith("u_"):
        return f"u_{{{name[2:]}}}"
    return name


def _latex(e: Expr) -> str:
    if isinstance(e, Const):
        return _frac_latex(e.value)
    if isinstance(e, Atom):
        return _latex_atom(e.name)
    if isinstance(e, Add):
        return _join_sum(e, _latex, spaced=False)
    if isinstance(e, Mul):
        c, rest = split_coeff(e)
        factors = rest.factors if isinstance(rest, Mul) else (rest,)
        body = " ".join(f"({_latex(f)})" if isinstance(f, Add) else _latex(f) for f in factors)
        if c == 1:
            return body
        if c == -1:
            return "-" + body
        return f"{_frac_latex(c)} {body}"
    if isinstance(e, Pow):
        b = e.base
        if isinstance(b, (Add, Mul, Pow)) or (isinstance(b, Const) and b.value < 0):
            base = f"({_latex(b)})"
        else:
            base = _latex(b)
        return f"{base}^{{{_latex(e.exp)}}}"
    if isinstance(e, Fn):
        if e.name == "exp":
            return f"e^{{{_latex(e.arg)}}}"
        if e.name == "abs":
            return f"|{_latex(e.arg)}|"
        if e.name == "log":
            return f"\\log({_latex(e.arg)})"
        return f"\\operatorname{{sign}}({_latex(e.arg)})"
    if isinstance(e, Call):
        args = ", ".join(_latex(a) for a in e.args)
        name = _latex_atom(e.name)
        if any(e.derivs):
            return f"{name}^{{({','.join(map(str, e.derivs))})}}({args})"
        return f"{name}({args})"
    raise TypeError(type(e))
