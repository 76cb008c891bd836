from __future__ import annotations

import json
import math
import pickle
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import EXPRESSIONS, PARSED, random_fixtures
from liesym.kernel import (
    ArityError,
    DomainError,
    EvalContext,
    NonPolynomialError,
    NumericallyZero,
    ParseError,
    ProvablyNonzero,
    ProvablyZero,
    UnknownSymbolError,
    collect_coefficients,
    differentiate,
    evaluate,
    is_zero,
    normalize,
    parse,
    reassemble,
    render,
    substitute,
)

ORACLE = json.loads((Path(__file__).parent / "data" / "derivative_oracle.json").read_text())
CTX = EvalContext()


def _zero(e, ctx=CTX) -> bool:
    return not isinstance(is_zero(e, ctx), ProvablyNonzero)


# parse / render


@pytest.mark.parametrize(
    "text, plain",
    [
        ("x^-1*t", "t*x^-1"),
        ("-x^2", "-x^2"),
        ("2*u*(1/2)", "u"),
        ("u^0", "1"),
        ("0^0", "1"),
        ("t/x", "t*x^-1"),
        ("1.5*t", "3/2*t"),
        ("H{0,1}(t,x)", "H{0,1}(t, x)"),
    ],
)
def test_parse_normalizes(text, plain):
    assert render(parse(text)) == plain


def test_latex_rendering():
    assert render(parse("(t-x)^-2*F(u)"), "latex") == "(t-x)^{-2} F(u)"
    assert render(parse("3/4*t"), "latex") == r"\frac{3}{4} t"
    assert render(parse("F{1}(u)"), "latex") == "F^{(1)}(u)"


def test_parse_errors():
    with pytest.raises(ParseError):
        parse("t +")
    with pytest.raises(UnknownSymbolError):
        parse("foo(t)")
    with pytest.raises(ArityError):
        parse("F(t, x)")
    with pytest.raises(ParseError) as info:
        parse("2 $ 3")
    assert info.value.position == 2


def test_parse_is_exact_on_rationals():
    assert parse("1/3 + 1/6") == parse("1/2")
    assert parse("0.25*u") == parse("u/4")


# differentiate / substitute


def test_differentiate_examples():
    assert differentiate(parse("t*u^2"), "u") == parse("2*t*u")
    assert differentiate(parse("F(t*u)"), "u") == parse("t*F{1}(t*u)")
    assert differentiate(parse("abs(u)^(3/2)"), "u") == parse("3/2*abs(u)^(1/2)*sign(u)")
    assert differentiate(parse("exp(t*x)"), "x") == parse("t*exp(t*x)")
    assert differentiate(parse("log(t)"), "t") == parse("t^-1")
    assert differentiate(parse("H(t, x)"), "x") == parse("H{0,1}(t, x)")


def test_substitute():
    e = parse("u_tx + g*u_x", _symbols_with_g())
    out = substitute(e, {"u_tx": parse("u_x + u")})
    assert out == parse("u_x + u + g*u_x", _symbols_with_g())
    assert substitute(parse("F(u)"), {"u": parse("2*t")}) == parse("F(2*t)")


def _symbols_with_g():
    from liesym.kernel import SymbolTable

    return SymbolTable({}, {"g"})


def test_exp_log_inverse():
    assert parse("exp(log(t))") == parse("t")
    assert parse("exp(t)*exp(-t)") == parse("1")


# evaluate / is_zero


def test_evaluate_examples():
    assert evaluate(parse("u + 1"), CTX, {"u": 2}) == 3
    assert evaluate(parse("t*x^-1"), CTX, {"t": 3, "x": 2}) == 1.5
    e = parse("F{0}(u) - F{0}(2*u*(1/2))")
    assert evaluate(e, CTX, {"u": 0.37}) == 0.0


def test_evaluate_cache_coherence_across_argument_forms():
    ctx = EvalContext(seed=3)
    a = evaluate(parse("F(t*x)"), ctx, {"t": 2, "x": 3})
    b = evaluate(parse("F(6)"), ctx, {})
    assert a == b


def test_evaluate_domain_errors():
    with pytest.raises(DomainError):
        evaluate(parse("log(t)"), CTX, {"t": -1})
    with pytest.raises(DomainError):
        evaluate(parse("t^-1"), CTX, {"t": 0})


def test_is_zero_examples():
    f = parse("(t - x)^-3*F((t - x)*u)")
    assert isinstance(is_zero(differentiate(f, "t") + differentiate(f, "x"), CTX), ProvablyZero)
    verdict = is_zero(parse("2*F(u)"), CTX)
    assert isinstance(verdict, ProvablyNonzero)
    assert verdict.witness
    assert isinstance(is_zero(parse("0"), CTX), ProvablyZero)


def test_is_zero_abs_cancellation_is_structural():
    e = parse("abs(t - x)^(m - 2)*abs(x)^(-m)*abs(x)^m*abs(t - x)^(2 - m) - 1")
    assert isinstance(is_zero(e, CTX), ProvablyZero)


def test_numeric_tier_is_reported_distinctly():
    # an identity the structural tier does not see through
    e = parse("exp(2*log(abs(u) + 1)) - (abs(u) + 1)^2")
    verdict = is_zero(e, CTX)
    assert isinstance(verdict, NumericallyZero) and verdict.samples == CTX.sample_count
    assert verdict.decided
    degenerate = is_zero(e, EvalContext(tolerance=0))
    assert isinstance(degenerate, NumericallyZero) and not degenerate.decided


def test_parameter_exclusions_respected():
    ctx = EvalContext(excluded={"m": {0}})
    r = random.Random(1)
    for _ in range(200):
        assert abs(ctx.sample_parameter("m", r)) > 0.1


# collect_coefficients


def test_collect_examples():
    coeffs = collect_coefficients(parse("-H(t,x)*u_tt - F(u)*u_tt*u_x"), ["u_tt", "u_x"])
    assert coeffs == {(("u_tt", 1),): parse("-H(t,x)"), (("u_tt", 1), ("u_x", 1)): parse("-F(u)")}
    assert collect_coefficients(parse("0"), ["u_x"]) == {}
    coeffs = collect_coefficients(parse("G(t)*u_x + H{1,1}(t,x)"), ["u_x"])
    assert coeffs == {(("u_x", 1),): parse("G(t)"), (): parse("H{1,1}(t,x)")}


def test_collect_rejects_non_polynomial():
    with pytest.raises(NonPolynomialError):
        collect_coefficients(parse("exp(u_x)"), ["u_x"])


def test_collect_reassembles():
    e = parse("(u_x + t)^3*F(u) - u_t*u_xx")
    coeffs = collect_coefficients(e, ["u_t", "u_x", "u_xx"])
    assert isinstance(is_zero(reassemble(coeffs) - e, CTX), ProvablyZero)


# frozen oracle


@pytest.mark.parametrize("case", ORACLE["cases"], ids=lambda c: c["expr"])
def test_derivatives_match_frozen_oracle(case):
    point = {k: _frac(v) for k, v in ORACLE["point"].items()}
    e = parse(case["expr"])
    assert math.isclose(evaluate(e, CTX, point), case["value"], rel_tol=1e-9, abs_tol=1e-12)
    for v, expected in case["derivatives"].items():
        got = evaluate(differentiate(e, v), CTX, point)
        assert math.isclose(got, expected, rel_tol=1e-9, abs_tol=1e-12), v


def _frac(text):
    from fractions import Fraction

    return Fraction(text)


# finite differences


def _fd_points(r):
    return {
        "t": r.uniform(0.5, 1.5),
        "x": -r.uniform(0.5, 1.5),
        "u": r.uniform(0.5, 1.5) * r.choice((-1, 1)),
    }


def finite_difference_failures(exprs, ctx, seed=11, step=1e-5, rel=1e-6):
    """Return (expr, var, exact, fd) for every mismatch beyond ``rel``."""
    r = random.Random(seed)
    failures = []
    checked = 0
    for e in exprs:
        point = _fd_points(r)
        for name in sorted(e.atoms - {"t", "x", "u"}):
            point[name] = r.uniform(0.3, 1.2)
        for v in ("t", "x", "u"):
            try:
                exact = evaluate(differentiate(e, v), ctx, point)
                hi = evaluate(e, ctx, {**point, v: point[v] + step})
                lo = evaluate(e, ctx, {**point, v: point[v] - step})
            except DomainError:
                continue
            fd = (hi - lo) / (2 * step)
            scale = max(1.0, abs(exact), abs(hi), abs(lo))
            if abs(fd - exact) > rel * scale:
                failures.append((render(e), v, exact, fd))
            checked += 1
    return failures, checked


def test_derivative_matches_finite_difference():
    exprs = PARSED + random_fixtures(80)
    assert len(exprs) >= 100
    failures, checked = finite_difference_failures(exprs, EvalContext(seed=5))
    assert checked >= 300
    assert not failures


# properties

fixture = st.sampled_from(PARSED)
var = st.sampled_from(["t", "x", "u"])


@given(st.sampled_from(EXPRESSIONS))
def test_render_parse_round_trip(text):
    e = parse(text)
    assert parse(render(e)) == e


@given(fixture)
def test_normalize_idempotent(e):
    assert normalize(normalize(e)) == normalize(e)


@settings(max_examples=60, deadline=None)
@given(fixture, fixture, var)
def test_product_rule(a, b, v):
    lhs = differentiate(a * b, v)
    rhs = a * differentiate(b, v) + b * differentiate(a, v)
    assert _zero(lhs - rhs)


@settings(max_examples=60, deadline=None)
@given(fixture, fixture, var, st.integers(-3, 3))
def test_linearity(a, b, v, c):
    lhs = differentiate(a + b * c, v)
    assert _zero(lhs - differentiate(a, v) - differentiate(b, v) * c)


@given(fixture)
def test_self_difference_is_provably_zero(e):
    assert isinstance(is_zero(normalize(e - e), CTX), ProvablyZero)


@settings(max_examples=40, deadline=None)
@given(fixture, st.integers(0, 10**6))
def test_verdicts_deterministic_in_seed(e, seed):
    e = e + parse("F(u)")
    a = is_zero(e, EvalContext(seed=seed))
    b = is_zero(e, EvalContext(seed=seed))
    assert a == b


@given(fixture)
def test_pickle_round_trip(e):
    assert pickle.loads(pickle.dumps(e)) == e
