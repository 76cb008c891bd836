"""Shared expression, field and transform fixtures."""

from __future__ import annotations

import random

from liesym.equivtrans import IDENTITY, PointTransform
from liesym.jet import VectorField
from liesym.kernel import parse

EXPRESSIONS = [
    "t",
    "u + 1",
    "t*x^-1",
    "x^2*t^-1 + u",
    "(t - x)^-3*u",
    "(t - x)^-2*F(u)",
    "(t - x)^-3*F((t - x)*u)",
    "exp(t*x)*F(exp(-t*x)*u)",
    "exp(t*x)*u^2",
    "log(t^2 + 1)*x",
    "abs(u)^(3/2)*t",
    "abs(t - x)^(m - 2)*abs(x)^(-m)",
    "lambda*abs(x)^(-m - 2)*abs(u)^(m + 1)",
    "lambda*abs(u)^(n + 1)",
    "exp(x^-1*u)",
    "exp(-t*x^-1)*x^-2*F(u*exp(t*x^-1))",
    "t^-1*G(t*x^-1)",
    "t^-2*(k*x + m*t)",
    "(m*t + (k - m)*x)*t^-1*(t - x)^-1",
    "H(t, u)*x",
    "H(t*x, u^2)",
    "G(t) + x",
    "sign(x)*x^3 + abs(x)",
    "log(abs(u) + 2)*exp(-u^2)",
    "(1 + t^2)^(-1/2)*x",
    "(u + t*x)^5",
    "(t^2 + x^2 + 1)^m",
    "exp(exp(t)*x)",
    "u^2*(t - x)^-1*(t + x)^-1",
    "epsilon*u + F{1}(t)",
    "F{2}(u*t) - u*x",
    "t*u^3 - 2/3*x",
    "G(x)*u + 4",
    "(x - t)*u^2*(t + 2)^-1",
    "exp(epsilon*t)*u",
    "t^u",
    "x^2*exp(u)",
    "F(u)^2*t",
    "H{1,0}(t, x)*u",
    "abs(t*x - 7)^(1/3)",
]

PARSED = [parse(s) for s in EXPRESSIONS]


def random_fixtures(count: int, seed: int = 7) -> list:
    """Sums and products of fixture pairs, deterministic in ``seed``."""
    r = random.Random(seed)
    out = []
    while len(out) < count:
        a, b = r.choice(PARSED), r.choice(PARSED)
        out.append(a * b if r.random() < 0.5 else a + b * r.randint(-3, 3))
    return out


FIELDS = [
    VectorField.parse(*parts)
    for parts in [
        ("1", "0", "0"),
        ("0", "1", "0"),
        ("t", "x", "0"),
        ("t^2", "x^2", "0"),
        ("1", "1", "0"),
        ("0", "0", "u"),
        ("0", "0", "t*u + x"),
        ("exp(t)", "0", "u*t"),
        ("t", "-x", "u + F(t)"),
        ("0", "x^3", "G(t)*u + H(t, x)"),
        ("t*x", "u", "t*u^2"),
        ("F(t)", "G(x)", "H(t, x)*u"),
    ]
]


def type1(T, X, U="1", Y="0", T_inv=None, X_inv=None):
    inv = {"T_inv": parse(T_inv) if T_inv else None, "X_inv": parse(X_inv) if X_inv else None}
    return PointTransform("type1", parse(T), parse(X), parse(U), parse(Y), **inv)


TRANSFORMS = [
    IDENTITY,
    type1("exp(t)", "x", T_inv="log(t)", X_inv="x"),
    type1("2*t + 1", "x", T_inv="(t - 1)/2", X_inv="x"),
    type1("t", "-x", T_inv="t", X_inv="-x"),
    type1("t", "x", U="exp(t)", T_inv="t", X_inv="x"),
    type1("t", "x", Y="t*x", T_inv="t", X_inv="x"),
    type1("t + 5", "3*x", U="2", Y="x^2", T_inv="t - 5", X_inv="x/3"),
    type1("t", "x", U="t^2 + 1", Y="exp(x)", T_inv="t", X_inv="x"),
    type1("exp(2*t)", "exp(x)", T_inv="log(t)/2", X_inv="log(x)"),
    type1("t^-1", "x^-1", U="t", T_inv="t^-1", X_inv="x^-1"),
]

PAIRS = [
    (VectorField.parse("1", "0", "0"), VectorField.parse("t", "x", "0")),
    (VectorField.parse("t", "x", "u"), VectorField.parse("t^2", "0", "t*u")),
    (VectorField.parse("0", "1", "t*u"), VectorField.parse("0", "0", "u")),
    (VectorField.parse("exp(t)", "x^2", "0"), VectorField.parse("0", "0", "x*t")),
    (VectorField.parse("F(t)", "G(x)", "u"), VectorField.parse("1", "1", "H(t,x)")),
]
