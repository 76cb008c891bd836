"""Recursive-descent parser for the expression grammar.

    expr   := term (("+"|"-") term)*
    term   := unary (("*"|"/") unary)*
    unary  := "-" unary | factor
    factor := base ("^" unary)?
    base   := NUMBER | IDENT | IDENT "{" INT ("," INT)* "}" "(" args ")"
            | IDENT "(" args ")" | "(" expr ")"

``^`` is right associative and binds tighter than unary minus on its left,
so ``-x^2`` is ``-(x^2)`` while ``x^-1`` is ``x^(-1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import ELEMENTARY, JET_ORDER, VARIABLES, Atom, Call, Const, Expr, add, fn, mul, power

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<ident>[^\W\d]\w*)|(?P<op>[-+*/^(){},]))", re.UNICODE)


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class UnknownSymbolError(ParseError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        super().__init__(f"unknown symbol {name!r}", position)


class ArityError(ParseError):
    pass


@dataclass
class SymbolTable:
    """Declared uninterpreted functions (name -> arity), parameters and aliases."""

    functions: dict = field(default_factory=dict)
    parameters: set = field(default_factory=set)
    aliases: dict = field(default_factory=dict)

    def with_aliases(self, aliases: dict) -> "SymbolTable":
        return SymbolTable(dict(self.functions), set(self.parameters), {**self.aliases, **aliases})


DEFAULT_SYMBOLS = SymbolTable(
    functions={"F": 1, "G": 1, "H": 2},
    parameters={"m", "k", "n", "lambda", "epsilon"},
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            skipped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + skipped]!r}", pos + skipped)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: SymbolTable):
        self.tokens = _tokenize(text)
        self.i = 0
        self.symbols = symbols

    @property
    def peek(self):
        return self.tokens[self.i]

    def take(self, value: str | None = None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek[0] != "end":
            raise ParseError(f"unexpected token {self.peek[1]!r}", self.peek[2])
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            terms.append(rhs if op == "+" else mul(Const(-1), rhs))
        return add(*terms)

    def term(self) -> Expr:
        factors = [self.unary()]
        while self.peek[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "/":
                if rhs.is_zero:
                    raise ParseError("division by zero", pos)
                rhs = power(rhs, Const(-1))
            factors.append(rhs)
        return mul(*factors)

    def unary(self) -> Expr:
        if self.peek[1] == "-":
            self.take()
            return mul(Const(-1), self.unary())
        if self.peek[1] == "+":
            self.take()
            return self.unary()
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        if self.peek[1] == "^":
            pos = self.take()[2]
            exponent = self.unary()
            try:
                return power(base, exponent)
            except ZeroDivisionError as exc:
                raise ParseError(str(exc), pos) from None
        return base

    def args(self) -> list:
        self.take("(")
        out = [self.expr()]
        while self.peek[1] == ",":
            self.take()
            out.append(self.expr())
        self.take(")")
        return out

    def base(self) -> Expr:
        kind, value, pos = self.peek
        if kind == "num":
            self.take()
            return Const(Fraction(value))
        if value == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind != "ident":
            raise ParseError(f"unexpected token {value or 'end of input'!r}", pos)
        self.take()
        name = value
        if self.peek[1] == "{":
            self.take()
            derivs = [self._int()]
            while self.peek[1] == ",":
                self.take()
                derivs.append(self._int())
            self.take("}")
            return self._call(name, derivs, self.args(), pos)
        if self.peek[1] == "(":
            args = self.args()
            if name in ELEMENTARY:
                if len(args) != 1:
                    raise ArityError(f"{name} takes exactly one argument", pos)
                return fn(name, args[0])
            return self._call(name, None, args, pos)
        if name in VARIABLES or name in JET_ORDER:
            return Atom(name)
        if name in self.symbols.aliases:
            return self.symbols.aliases[name]
        if name in self.symbols.parameters:
            return Atom(name)
        if name in self.symbols.functions or name in ELEMENTARY:
            raise ParseError(f"function {name!r} used without arguments", pos)
        raise UnknownSymbolError(name, pos)

    def _int(self) -> int:
        kind, value, pos = self.take()
        if kind != "num" or not value.isdigit():
            raise ParseError(f"expected a derivative order, found {value!r}", pos)
        return int(value)

    def _call(self, name, derivs, args, pos) -> Expr:
        if name not in self.symbols.functions:
            raise UnknownSymbolError(name, pos)
        arity = self.symbols.functions[name]
        if len(args) != arity:
            raise ArityError(f"{name} expects {arity} argument(s), got {len(args)}", pos)
        if derivs is None:
            derivs = [0] * arity
        if len(derivs) != arity:
            raise ArityError(f"derivative index of {name} needs {arity} entries, got {len(derivs)}", pos)
        return Call(name, derivs, args)


def parse(text: str, symbols: SymbolTable | None = None) -> Expr:
    """Parse ``text`` into a normalized expression."""
    return _Parser(text, symbols or DEFAULT_SYMBOLS).parse()
