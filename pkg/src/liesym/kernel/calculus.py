"""Differentiation, substitution, expansion and coefficient collection."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .expr import (
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
    add,
    base_exp,
    fn,
    integer_value,
    mul,
    power,
    rebuild,
    split_coeff,
    subexpressions,
)
from .render import render


class NonPolynomialError(ValueError):
    """An expression depends non-polynomially on a collection atom."""


def differentiate(e: Expr, v) -> Expr:
    """Exact partial derivative of ``e`` with respect to the atom ``v``."""
    name = v.name if isinstance(v, Atom) else v
    return _diff(e, name)


@lru_cache(maxsize=200_000)
def _diff(e: Expr, v: str) -> Expr:
    if v not in e.atoms:
        return ZERO
    if isinstance(e, Atom):
        return ONE
    if isinstance(e, Add):
        return add(*[_diff(t, v) for t in e.terms])
    if isinstance(e, Mul):
        terms = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _diff(f, v)
            if not df.is_zero:
                terms.append(mul(df, *fs[:i], *fs[i + 1 :]))
        return add(*terms)
    if isinstance(e, Pow):
        b, p = e.base, e.exp
        db = _diff(b, v)
        if v not in p.atoms:
            return mul(p, power(b, add(p, Const(-1))), db)
        dp = _diff(p, v)
        return mul(e, add(mul(dp, fn("log", b)), mul(p, db, power(b, Const(-1)))))
    if isinstance(e, Fn):
        da = _diff(e.arg, v)
        if e.name == "exp":
            return mul(e, da)
        if e.name == "log":
            return mul(da, power(e.arg, Const(-1)))
        if e.name == "abs":
            return mul(fn("sign", e.arg), da)
        return ZERO  # sign is locally constant
    if isinstance(e, Call):
        terms = []
        for i, a in enumerate(e.args):
            da = _diff(a, v)
            if da.is_zero:
                continue
            derivs = list(e.derivs)
            derivs[i] += 1
            terms.append(mul(Call(e.name, derivs, e.args), da))
        return add(*terms)
    raise TypeError(type(e))


def substitute(e: Expr, bindings: dict) -> Expr:
    """Simultaneous substitution of atoms or exact call patterns, then normalize.

    Keys may be ``Atom`` nodes, atom names, or ``Call`` nodes.
    """
    table = {}
    for k, val in bindings.items():
        key = Atom(k) if isinstance(k, str) else k
        table[key] = val
    names = {k.name for k in table if isinstance(k, Atom)}
    has_calls = any(isinstance(k, Call) for k in table)
    return _subst(e, table, frozenset(names), has_calls)


def _subst(e, table, names, has_calls):
    if not has_calls and names.isdisjoint(e.atoms):
        return e
    if e in table:
        return table[e]
    if isinstance(e, (Const, Atom)):
        return e
    if isinstance(e, Add):
        return add(*[_subst(t, table, names, has_calls) for t in e.terms])
    if isinstance(e, Mul):
        return mul(*[_subst(f, table, names, has_calls) for f in e.factors])
    if isinstance(e, Pow):
        return power(_subst(e.base, table, names, has_calls), _subst(e.exp, table, names, has_calls))
    if isinstance(e, Fn):
        return fn(e.name, _subst(e.arg, table, names, has_calls))
    if isinstance(e, Call):
        out = Call(e.name, e.derivs, [_subst(a, table, names, has_calls) for a in e.args])
        return table.get(out, out)
    raise TypeError(type(e))


def _positive_int(e: Expr):
    n = integer_value(e)
    return n if n is not None and n > 0 else None


def _terms(e: Expr) -> tuple:
    return e.terms if isinstance(e, Add) else (e,)


def _expand_once(e: Expr, only) -> Expr:
    def wanted(node: Expr) -> bool:
        return only is None or not node.atoms.isdisjoint(only)

    if isinstance(e, (Const, Atom)):
        return e
    if isinstance(e, Add):
        return add(*[_expand_once(t, only) for t in e.terms])
    if isinstance(e, Mul):
        products = [ONE]
        for f in e.factors:
            f = _expand_once(f, only)
            if isinstance(f, Add) and wanted(f):
                products = [mul(p, t) for p in products for t in f.terms]
            else:
                products = [mul(p, f) for p in products]
        return add(*products)
    if isinstance(e, Pow):
        b = _expand_once(e.base, only) if only is None else e.base
        n = _positive_int(e.exp)
        if n is not None and isinstance(b, Add) and wanted(b):
            result = b
            for _ in range(n - 1):
                result = add(*[mul(p, t) for p in _terms(result) for t in b.terms])
            return result
        expo = _expand_once(e.exp, only) if only is None else e.exp
        return power(b, expo)
    if only is not None:
        return e
    if isinstance(e, Fn):
        return fn(e.name, _expand_once(e.arg, only))
    if isinstance(e, Call):
        return Call(e.name, e.derivs, [_expand_once(a, only) for a in e.args])
    raise TypeError(type(e))


def expand(e: Expr, only=None) -> Expr:
    """Distribute products over sums.

    With ``only`` (a set of atom names) only sums involving those atoms are
    distributed and function arguments are left alone; otherwise everything is
    expanded, including arguments of elementary and uninterpreted calls.
    """
    only = frozenset(only) if only is not None else None
    return _expand_cached(e, only)


@lru_cache(maxsize=50_000)
def _expand_cached(e: Expr, only) -> Expr:
    for _ in range(16):
        nxt = _expand_once(e, only)
        if nxt == e:
            return e
        e = nxt
    return e


def _rational_part(e: Expr) -> Fraction:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Add) and isinstance(e.terms[-1], Const):
        return e.terms[-1].value
    return Fraction(0)


def _sign_atom(a: Expr) -> Atom:
    return Atom(f"sign[{render(a)}]")


def _split_abs(e: Expr) -> Expr:
    """Rewrite |a|^(s + n) as W^s * a^n * S^(n mod 2) with opaque atoms W = |a|, S = sign(a).

    The normal form folds integer powers of ``a`` into symbolic powers of
    |a|, which hides cancellations between, say, x*|x|^-m and |x|^(1-m)*sign(x).
    The rewrite preserves values, so a zero result still proves zero.
    """
    if isinstance(e, (Const, Atom)):
        return e
    if isinstance(e, Pow) and isinstance(e.base, Fn) and e.base.name == "abs":
        a = _split_abs(e.base.arg)
        p = _split_abs(e.exp)
        c = _rational_part(p)
        n = c.numerator // c.denominator
        sym = add(p, Const(-n))
        factors = [power(a, Const(n))]
        if n % 2:
            factors.append(_sign_atom(a))
        if not sym.is_zero:
            factors.append(power(Atom(f"abs[{render(a)}]"), sym))
        return mul(*factors)
    if isinstance(e, Fn) and e.name in ("abs", "sign"):
        a = _split_abs(e.arg)
        return mul(a, _sign_atom(a)) if e.name == "abs" else _sign_atom(a)
    if isinstance(e, Add):
        return add(*[_split_abs(t) for t in e.terms])
    if isinstance(e, Mul):
        return mul(*[_split_abs(f) for f in e.factors])
    if isinstance(e, Pow):
        return power(_split_abs(e.base), _split_abs(e.exp))
    if isinstance(e, Fn):
        return fn(e.name, _split_abs(e.arg))
    if isinstance(e, Call):
        return Call(e.name, e.derivs, [_split_abs(a) for a in e.args])
    raise TypeError(type(e))


def _reduce_signs(e: Expr) -> Expr:
    """S^k -> S^(k mod 2) for the opaque sign atoms."""

    def step(node):
        if isinstance(node, Pow) and isinstance(node.base, Atom) and node.base.name.startswith("sign["):
            k = integer_value(node.exp)
            if k is not None:
                return node.base if k % 2 else ONE
        return node

    return rebuild(e, step)


def cleared_form(e: Expr) -> Expr:
    """Fully expanded ``e`` multiplied through by its sum-denominators.

    Negative powers of sums are not distributed by ``expand``; multiplying by
    the largest such power turns them into polynomial factors.  The result is
    zero exactly when ``e`` is (for the generic nonvanishing denominators).
    """
    if any(isinstance(node, Fn) and node.name in ("abs", "sign") for node in subexpressions(e)):
        e = _reduce_signs(expand(_split_abs(e)))
    e = expand(e)
    for _ in range(6):
        lowest: dict = {}
        for term in _terms(e):
            seen = set()
            factors = term.factors if isinstance(term, Mul) else (term,)
            for f in factors:
                b, p = base_exp(f)
                if isinstance(b, Add):
                    seen.add(b)
                    lowest[b] = min(lowest.get(b, Fraction(0)), _rational_part(p))
            for b in lowest:
                if b not in seen:
                    lowest[b] = min(lowest[b], Fraction(0))
        needed = [power(b, Const(-c)) for b, c in lowest.items() if c < 0]
        if not needed:
            return e
        # multiply term by term so the powers merge before anything is distributed
        e = _reduce_signs(expand(add(*[mul(*needed, term) for term in _terms(e)])))
    return e


def collect_coefficients(e: Expr, basis) -> dict:
    """Map jet monomials to their coefficients.

    ``basis`` is a collection of atom names.  Monomials are tuples of
    ``(name, power)`` pairs in sorted order; ``()`` is the constant monomial.
    Coefficients are free of basis atoms, and zero coefficients are omitted.
    """
    basis = frozenset(b.name if isinstance(b, Atom) else b for b in basis)
    expanded = expand(e, only=basis)
    buckets: dict = {}
    for term in _terms(expanded):
        c, rest = split_coeff(term)
        factors = rest.factors if isinstance(rest, Mul) else (() if rest == ONE else (rest,))
        mono = []
        coeff_factors = [Const(c)]
        for f in factors:
            b, p = base_exp(f)
            if isinstance(b, Atom) and b.name in basis:
                n = integer_value(p)
                if n is None or n < 0:
                    raise NonPolynomialError(f"{b.name} appears with exponent {p}")
                mono.append((b.name, n))
            elif not f.atoms.isdisjoint(basis):
                raise NonPolynomialError(f"non-polynomial dependence on {sorted(f.atoms & basis)}")
            else:
                coeff_factors.append(f)
        key = tuple(sorted(mono))
        buckets.setdefault(key, []).append(mul(*coeff_factors))
    out = {}
    for key in sorted(buckets, key=lambda k: (sum(p for _, p in k), k)):
        coeff = add(*buckets[key])
        if not coeff.is_zero:
            out[key] = coeff
    return out


def monomial_expr(mono) -> Expr:
    return mul(*[power(Atom(name), Const(p)) for name, p in mono])


def render_monomial(mono) -> str:
    if not mono:
        return "1"
    return "*".join(name if p == 1 else f"{name}^{p}" for name, p in mono)


def reassemble(coeffs: dict) -> Expr:
    return add(*[mul(c, monomial_expr(m)) for m, c in coeffs.items()])


def free_of(e: Expr, *names: str) -> bool:
    return e.atoms.isdisjoint(names)


__all__ = [
    "NonPolynomialError",
    "differentiate",
    "substitute",
    "expand",
    "cleared_form",
    "collect_coefficients",
    "monomial_expr",
    "render_monomial",
    "reassemble",
    "rebuild",
]
