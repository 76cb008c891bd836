"""Immutable expression trees and their canonicalizing constructors.

Every public constructor (``add``, ``mul``, ``power``, ``fn``, ``call``)
returns a tree in normal form, so trees built through the API never need an
extra normalization pass.  ``normalize`` rebuilds an arbitrary tree through
the same constructors.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

VARIABLES = ("t", "x")
DEPENDENT = "u"
JETS = ("u_t", "u_x", "u_tt", "u_tx", "u_xx")
JET_ORDER = {"u": 0, "u_t": 1, "u_x": 1, "u_tt": 2, "u_tx": 2, "u_xx": 2}
ELEMENTARY = ("exp", "log", "abs", "sign")
RESERVED = frozenset(VARIABLES + (DEPENDENT,) + JETS + ELEMENTARY)

_KIND_CONST, _KIND_ATOM, _KIND_ADD, _KIND_MUL, _KIND_POW, _KIND_FN, _KIND_CALL = range(7)


def _atom_rank(name: str) -> int:
    if name in VARIABLES:
        return 0
    if name in JET_ORDER:
        return 1
    return 2


class Expr:
    """Base class of all expression nodes.

    Nodes are hashable and compare structurally.  Arithmetic operators build
    normalized trees, and plain Python numbers are coerced to constants.
    """

    __slots__ = ("_hash", "_key", "_atoms")

    def _children(self) -> tuple:
        raise NotImplementedError

    def _compute_key(self) -> tuple:
        raise NotImplementedError

    @property
    def sort_key(self) -> tuple:
        try:
            return self._key
        except AttributeError:
            key = self._compute_key()
            object.__setattr__(self, "_key", key)
            return key

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._children()))
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        if hash(self) != hash(other):
            return False
        return self._children() == other._children()

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __setattr__(self, name, value):
        raise AttributeError("Expr nodes are immutable")

    def __reduce__(self):
        if isinstance(self, (Add, Mul)):
            return (type(self), (self._children(),))
        return (type(self), self._children())

    def __repr__(self) -> str:
        from .render import render

        return f"Expr({render(self)!r})"

    def __str__(self) -> str:
        from .render import render

        return render(self)

    @property
    def atoms(self) -> frozenset:
        """Names of all atoms (variables, jets, parameters) occurring in the tree."""
        try:
            return self._atoms
        except AttributeError:
            found: set = set()
            for child in self._subexprs():
                found |= child.atoms
            result = frozenset(found)
            object.__setattr__(self, "_atoms", result)
            return result

    def _subexprs(self) -> Iterable["Expr"]:
        return ()

    def has(self, *names: str) -> bool:
        return not self.atoms.isdisjoint(names)

    @property
    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0

    # arithmetic sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(MINUS_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), MINUS_ONE))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, MINUS_ONE))

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return mul(MINUS_ONE, self)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def _children(self):
        return (self.value,)

    def _compute_key(self):
        return (_KIND_CONST, self.value)

    @property
    def atoms(self):
        return frozenset()

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1


class Atom(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _children(self):
        return (self.name,)

    def _compute_key(self):
        return (_KIND_ATOM, _atom_rank(self.name), self.name)

    @property
    def atoms(self):
        return frozenset((self.name,))

    @property
    def is_parameter(self) -> bool:
        return self.name not in RESERVED


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))

    def _children(self):
        return self.terms

    def _subexprs(self):
        return self.terms

    def _compute_key(self):
        return (_KIND_ADD, tuple(t.sort_key for t in self.terms))


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))

    def _children(self):
        return self.factors

    def _subexprs(self):
        return self.factors

    def _compute_key(self):
        return (_KIND_MUL, tuple(f.sort_key for f in self.factors))


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", exp)

    def _children(self):
        return (self.base, self.exp)

    def _subexprs(self):
        return (self.base, self.exp)

    def _compute_key(self):
        return (_KIND_POW, self.base.sort_key, self.exp.sort_key)


class Fn(Expr):
    """Elementary function call: one of exp, log, abs, sign."""

    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)

    def _children(self):
        return (self.name, self.arg)

    def _subexprs(self):
        return (self.arg,)

    def _compute_key(self):
        return (_KIND_FN, self.name, self.arg.sort_key)


class Call(Expr):
    """Uninterpreted function F with partial-derivative multi-index ``derivs``."""

    __slots__ = ("name", "derivs", "args")

    def __init__(self, name: str, derivs, args):
        derivs = tuple(int(d) for d in derivs)
        args = tuple(args)
        if len(derivs) != len(args):
            raise ValueError(f"derivative index {derivs} does not match arity {len(args)} of {name}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "derivs", derivs)
        object.__setattr__(self, "args", args)

    def _children(self):
        return (self.name, self.derivs, self.args)

    def _subexprs(self):
        return self.args

    def _compute_key(self):
        return (_KIND_CALL, self.name, self.derivs, tuple(a.sort_key for a in self.args))

    @property
    def arity(self) -> int:
        return len(self.args)


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)
T = Atom("t")
X = Atom("x")
U = Atom("u")


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(value)
    if isinstance(value, str):
        return Atom(value)
    raise TypeError(f"cannot convert {value!r} to an expression")


def const(value) -> Const:
    return Const(value)


def atom(name: str) -> Atom:
    return Atom(name)


def integer_value(e: Expr):
    """The int value of an integer constant, else None."""
    if isinstance(e, Const) and e.value.denominator == 1:
        return e.value.numerator
    return None


def split_coeff(e: Expr) -> tuple[Fraction, Expr]:
    """Split a term into (rational coefficient, remaining factor)."""
    if isinstance(e, Const):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def _with_coeff(c: Fraction, rest: Expr) -> Expr:
    if c == 1:
        return rest
    if rest == ONE:
        return Const(c)
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.factors)
    return Mul((Const(c), rest))


def base_exp(e: Expr) -> tuple[Expr, Expr]:
    if isinstance(e, Pow):
        return e.base, e.exp
    return e, ONE


def add(*args: Expr) -> Expr:
    """Flattened sum with like terms collected and terms sorted."""
    constant = Fraction(0)
    coeffs: dict = {}
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Add):
            stack.extend(a.terms)
            continue
        if isinstance(a, Const):
            constant += a.value
            continue
        c, rest = split_coeff(a)
        coeffs[rest] = coeffs.get(rest, 0) + c
    items = sorted(((r, c) for r, c in coeffs.items() if c != 0), key=lambda rc: rc[0].sort_key)
    terms = [_with_coeff(c, r) for r, c in items]
    if constant != 0:
        terms.append(Const(constant))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(terms)


def _parity(e: Expr):
    n = integer_value(e)
    return None if n is None else n % 2


def _fold_abs_sign(powers: dict) -> None:
    """Canonicalize products of a^n, |a|^p and sign(a)^s for a shared inner a."""
    inners = []
    for b in powers:
        if isinstance(b, Fn) and b.name in ("abs", "sign") and b.arg not in inners:
            inners.append(b.arg)
    for a in inners:
        abs_b, sign_b = Fn("abs", a), Fn("sign", a)
        n = powers.get(a, ZERO)
        p = powers.get(abs_b, ZERO)
        s = powers.get(sign_b, ZERO)
        if _parity(s) is None:
            continue
        if p.is_zero:
            if integer_value(n) is None:
                new_n, new_p, new_s = n, ZERO, Const(_parity(s))
            else:
                new_n, new_p, new_s = _integer_canonical(integer_value(n), _parity(s))
        elif integer_value(p) is not None:
            total_n = add(n, p)
            total_s = integer_value(s) + integer_value(p)
            if integer_value(total_n) is not None:
                new_n, new_p, new_s = _integer_canonical(integer_value(total_n), total_s % 2)
            else:
                new_n, new_p, new_s = total_n, ZERO, Const(total_s % 2)
        elif integer_value(n) is not None:
            new_n = ZERO
            new_p = add(p, n)
            new_s = Const((integer_value(s) + integer_value(n)) % 2)
        else:
            new_n, new_p, new_s = n, p, Const(_parity(s))
        for key in (a, abs_b, sign_b):
            powers.pop(key, None)
        for key, val in ((a, new_n), (abs_b, new_p), (sign_b, new_s)):
            if not val.is_zero:
                powers[key] = val


def _integer_canonical(n: int, s: int) -> tuple[Expr, Expr, Expr]:
    # a^n * sign(a)^s with integer n, s in {0, 1}
    if s == 0:
        return Const(n), ZERO, ZERO
    if n % 2:
        return ZERO, Const(n), ZERO
    return Const(n), ZERO, ONE


def mul(*args: Expr) -> Expr:
    """Flattened product with powers of equal bases merged."""
    coeff = Fraction(1)
    powers: dict = {}
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Mul):
            stack.extend(a.factors)
            continue
        if isinstance(a, Const):
            coeff *= a.value
            continue
        b, e = base_exp(a)
        powers[b] = add(powers[b], e) if b in powers else e
    if coeff == 0:
        return ZERO

    # rewrites that can introduce new bases go back through the merge
    pending = []
    exp_bases = [b for b in powers if isinstance(b, Fn) and b.name == "exp"]
    if exp_bases and (len(exp_bases) > 1 or powers[exp_bases[0]] != ONE):
        total = add(*[mul(b.arg, powers.pop(b)) for b in exp_bases])
        pending.append(fn("exp", total))
    for b in list(powers):
        e = powers[b]
        if isinstance(b, Const) and integer_value(e) is not None:
            n = integer_value(e)
            if b.value == 0 and n < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            coeff *= b.value**n
            del powers[b]
        elif isinstance(b, (Mul, Pow, Const)) and integer_value(e) is not None:
            pending.append(power(b, powers.pop(b)))
    if pending:
        rebuilt = [Pow(b, e) if e != ONE else b for b, e in powers.items() if not e.is_zero]
        return mul(Const(coeff), *rebuilt, *pending)

    if any(isinstance(b, Fn) and b.name in ("abs", "sign") for b in powers):
        _fold_abs_sign(powers)

    factors = [b if e == ONE else Pow(b, e) for b, e in powers.items() if not e.is_zero]
    if coeff == 0:
        return ZERO
    if not factors:
        return Const(coeff)
    factors.sort(key=lambda f: (base_exp(f)[0].sort_key, base_exp(f)[1].sort_key))
    if len(factors) == 1:
        f = factors[0]
        if coeff == 1:
            return f
        if isinstance(f, Add):
            # numeric coefficients distribute over a lone sum
            return add(*[mul(Const(coeff), t) for t in f.terms])
        return Mul((Const(coeff), f))
    if coeff == 1:
        return Mul(factors)
    return Mul([Const(coeff)] + factors)


def power(base: Expr, exponent: Expr) -> Expr:
    if exponent.is_zero:
        return ONE
    if exponent == ONE:
        return base
    n = integer_value(exponent)
    if isinstance(base, Const):
        if base.value == 1:
            return ONE
        if base.value == 0:
            if isinstance(exponent, Const):
                if exponent.value < 0:
                    raise ZeroDivisionError("0 raised to a negative power")
                return ZERO
            return Pow(base, exponent)
        if n is not None:
            return Const(base.value**n)
        return Pow(base, exponent)
    if isinstance(base, Pow) and n is not None:
        return power(base.base, mul(base.exp, exponent))
    if isinstance(base, Mul) and n is not None:
        return mul(*[power(f, exponent) for f in base.factors])
    if isinstance(base, Fn) and base.name == "exp":
        return fn("exp", mul(base.arg, exponent))
    if isinstance(base, Fn) and base.name in ("abs", "sign"):
        return mul(Pow(base, exponent))
    return Pow(base, exponent)


def fn(name: str, arg: Expr) -> Expr:
    """Elementary function with the rewrite rules of the normal form applied."""
    if name == "exp":
        if arg.is_zero:
            return ONE
        if isinstance(arg, Fn) and arg.name == "log":
            return arg.arg
        return Fn("exp", arg)
    if name == "log":
        if arg == ONE:
            return ZERO
        if isinstance(arg, Fn) and arg.name == "exp":
            return arg.arg
        return Fn("log", arg)
    if name == "abs":
        if isinstance(arg, Const):
            return Const(abs(arg.value))
        if isinstance(arg, Mul):
            return mul(*[fn("abs", f) for f in arg.factors])
        if isinstance(arg, Pow):
            return power(fn("abs", arg.base), arg.exp)
        if isinstance(arg, Fn) and arg.name in ("exp", "abs"):
            return arg
        if isinstance(arg, Fn) and arg.name == "sign":
            return ONE
        return Fn("abs", arg)
    if name == "sign":
        if isinstance(arg, Const):
            return Const((arg.value > 0) - (arg.value < 0))
        if isinstance(arg, Mul):
            return mul(*[fn("sign", f) for f in arg.factors])
        if isinstance(arg, Pow) and integer_value(arg.exp) is not None:
            return power(fn("sign", arg.base), arg.exp)
        if isinstance(arg, Fn) and arg.name in ("exp", "abs"):
            return ONE
        if isinstance(arg, Fn) and arg.name == "sign":
            return arg
        return Fn("sign", arg)
    raise ValueError(f"unknown elementary function {name!r}")


def call(name: str, derivs, args) -> Call:
    return Call(name, derivs, args)


def exp(a: Expr) -> Expr:
    return fn("exp", as_expr(a))


def log(a: Expr) -> Expr:
    return fn("log", as_expr(a))


def Abs(a: Expr) -> Expr:
    return fn("abs", as_expr(a))


def sign(a: Expr) -> Expr:
    return fn("sign", as_expr(a))


def rebuild(e: Expr, transform) -> Expr:
    """Rebuild ``e`` bottom-up through the normalizing constructors.

    ``transform`` maps each rebuilt node to its replacement (identity to
    simply normalize).
    """
    if isinstance(e, (Const, Atom)):
        return transform(e)
    if isinstance(e, Add):
        out = add(*[rebuild(t, transform) for t in e.terms])
    elif isinstance(e, Mul):
        out = mul(*[rebuild(f, transform) for f in e.factors])
    elif isinstance(e, Pow):
        out = power(rebuild(e.base, transform), rebuild(e.exp, transform))
    elif isinstance(e, Fn):
        out = fn(e.name, rebuild(e.arg, transform))
    elif isinstance(e, Call):
        out = Call(e.name, e.derivs, [rebuild(a, transform) for a in e.args])
    else:  # pragma: no cover
        raise TypeError(type(e))
    return transform(out)


def normalize(e: Expr) -> Expr:
    """Canonical form: idempotent, deterministic, never expands products."""
    return rebuild(e, lambda node: node)


def subexpressions(e: Expr):
    """Pre-order traversal of all nodes."""
    yield e
    for child in e._subexprs():
        yield from subexpressions(child)


def calls_in(e: Expr) -> set:
    return {s for s in subexpressions(e) if isinstance(s, Call)}
