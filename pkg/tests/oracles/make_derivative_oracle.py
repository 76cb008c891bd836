"""Regenerate tests/data/derivative_oracle.json with sympy as an independent CAS.

Run by hand (``python3 tests/oracles/make_derivative_oracle.py``); the test
suite only reads the frozen JSON, so sympy is not a test dependency.
"""

from __future__ import annotations

import json
from pathlib import Path

import sympy as sp

EXPRESSIONS = [
    "t^-1*x^2 + u",
    "(t - x)^-3*u",
    "exp(t*x)*u^2",
    "log(t^2 + 1)*x",
    "abs(u)^(3/2)*t",
    "abs(t - x)^(m - 2)*abs(x)^(-m)",
    "u*abs(t - x)^(-m)*abs(x)^m",
    "exp(-t*x^-1)*x^-2",
    "(m*t + (k - m)*x)*t^-1*(t - x)^-1",
    "t^-2*(k*x + m*t)",
    "(t*x)^-1*(m*x - t)",
    "lambda*abs(x)^(-m - 2)*abs(u)^(m + 1)",
    "lambda*abs(u)^(n + 1)",
    "exp(x^-1*u)",
    "(t - x)^-2*u^3",
    "exp(epsilon*t)*(t - x)*exp(-epsilon*t)*u",
    "sign(x)*x^3 + abs(x)",
    "log(abs(u) + 2)*exp(-u^2)",
    "(1 + t^2)^(-1/2)*x",
    "(u + t*x)^5",
    "t^u",
    "(t^2 + x^2 + 1)^m",
    "exp(exp(t)*x)",
    "u^2*(t - x)^-1*(t + x)^-1",
    "abs(t*x - u)^(1/3)",
]
POINT = {"t": "7/5", "x": "-3/4", "u": "9/10", "m": "5/7", "k": "-4/3", "n": "3/2", "lambda": "2/3", "epsilon": "1/2"}


def to_sympy(text: str):
    names = {n: sp.Symbol(n, real=True) for n in POINT}
    names.update({"exp": sp.exp, "log": sp.log, "abs": sp.Abs, "sign": sp.sign, "lambda": sp.Symbol("lambda", real=True)})
    cleaned = text.replace("^", "**").replace("lambda", "lam")
    names["lam"] = names.pop("lambda")
    return sp.sympify(cleaned, locals=names), names


def main():
    rows = []
    for text in EXPRESSIONS:
        e, names = to_sympy(text)
        subs = {names["lam" if k == "lambda" else k]: sp.Rational(v) for k, v in POINT.items()}
        value = float(e.subs(subs).evalf(30))
        derivs = {}
        for v in ("t", "x", "u"):
            d = sp.diff(e, names[v])
            d = d.replace(sp.DiracDelta, lambda *a: 0)
            derivs[v] = float(d.subs(subs).evalf(30))
        rows.append({"expr": text, "value": value, "derivatives": derivs})
    out = {"point": POINT, "cases": rows}
    path = Path(__file__).resolve().parents[1] / "data" / "derivative_oracle.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(rows)} cases to {path}")


if __name__ == "__main__":
    main()
