"""Minimal computer-algebra kernel: trees, parsing, calculus, zero tests."""

from .calculus import (
    NonPolynomialError,
    cleared_form,
    collect_coefficients,
    differentiate,
    expand,
    monomial_expr,
    reassemble,
    render_monomial,
    substitute,
)
from .expr import (
    MINUS_ONE,
    ONE,
    ZERO,
    Add,
    Atom,
    Call,
    Const,
    Expr,
    Fn,
    Mul,
    Pow,
    T,
    U,
    X,
    Abs,
    add,
    as_expr,
    atom,
    call,
    const,
    exp,
    fn,
    log,
    mul,
    normalize,
    power,
    sign,
)
from .numeric import (
    DomainError,
    EvalContext,
    NumericallyZero,
    ProvablyNonzero,
    ProvablyZero,
    ZeroVerdict,
    evaluate,
    is_zero,
)
from .parser import DEFAULT_SYMBOLS, ArityError, ParseError, SymbolTable, UnknownSymbolError, parse
from .render import render
