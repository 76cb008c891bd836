"""Numeric evaluation and the two-tier zero test.

Uninterpreted functions are modelled by random smooth functions (short sums
of sinusoids with random frequencies and phases), drawn once per symbol from
the context seed.  Derivatives of the model are exact, so identities that
hold for every smooth function hold for the model, and finite differences
agree with symbolic derivatives.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .calculus import cleared_form, expand
from .expr import JET_ORDER, VARIABLES, Add, Atom, Call, Const, Expr, Fn, Mul, Pow
from .render import render

_MODEL_TERMS = 5


class DomainError(ArithmeticError):
    """Evaluation left the real domain (log of a non-positive number, 0^-1, ...).

    Signals the caller to resample rather than fail.
    """


@dataclass(frozen=True)
class ZeroVerdict:
    @property
    def is_nonzero(self) -> bool:
        return isinstance(self, ProvablyNonzero)

    @property
    def decided(self) -> bool:
        return not (isinstance(self, NumericallyZero) and self.samples == 0)


@dataclass(frozen=True)
class ProvablyZero(ZeroVerdict):
    def describe(self) -> str:
        return "provably zero"


@dataclass(frozen=True)
class ProvablyNonzero(ZeroVerdict):
    witness: dict
    value: float

    def describe(self) -> str:
        point = ", ".join(f"{k}={v}" for k, v in sorted(self.witness.items()))
        return f"nonzero: {self.value:.6g} at {point}"


@dataclass(frozen=True)
class NumericallyZero(ZeroVerdict):
    samples: int
    max_abs: float

    def describe(self) -> str:
        if self.samples == 0:
            return "undecided: no numeric samples"
        return f"numerically zero ({self.samples} samples, max |value| {self.max_abs:.3g})"


@dataclass
class EvalContext:
    """Seeded evaluation settings plus the uninterpreted-call cache.

    ``excluded`` maps parameter names to rational values that sampling must
    avoid.  A context is single-owner; use ``spawn`` to hand one to a task.
    """

    seed: int = 42
    sample_count: int = 16
    tolerance: float = 1e-9
    excluded: dict = field(default_factory=dict)
    cache: dict = field(default_factory=dict, repr=False)
    _models: dict = field(default_factory=dict, repr=False)

    def spawn(self, tag: str = "", excluded: dict | None = None) -> "EvalContext":
        """A fresh context whose randomness depends only on (seed, tag)."""
        merged = {k: set(v) for k, v in self.excluded.items()}
        for k, v in (excluded or {}).items():
            merged.setdefault(k, set()).update(v)
        seed = self.seed if not tag else _derive_seed(self.seed, tag)
        return EvalContext(seed, self.sample_count, self.tolerance, merged)

    def rng(self, tag: str) -> random.Random:
        return random.Random(f"{self.seed}|{tag}")

    def _model(self, name: str, arity: int):
        key = (name, arity)
        if key not in self._models:
            r = random.Random(f"{self.seed}|model|{name}|{arity}")
            terms = []
            for _ in range(_MODEL_TERMS):
                c = r.uniform(0.5, 1.5) * r.choice((-1, 1))
                w = tuple(r.uniform(0.4, 1.6) * r.choice((-1, 1)) for _ in range(arity))
                phase = r.uniform(0, 2 * math.pi)
                terms.append((c, w, phase))
            self._models[key] = terms
        return self._models[key]

    def call_value(self, name: str, derivs: tuple, args: tuple) -> float:
        key = (name, derivs, tuple(round(a * 1e12) for a in args))
        if key in self.cache:
            return self.cache[key]
        order = sum(derivs)
        total = 0.0
        for c, w, phase in self._model(name, len(args)):
            scale = c
            for wi, di in zip(w, derivs):
                scale *= wi**di
            total += scale * math.sin(sum(wi * a for wi, a in zip(w, args)) + phase + order * math.pi / 2)
        self.cache[key] = total
        return total

    def sample_parameter(self, name: str, r: random.Random) -> Fraction:
        banned = self.excluded.get(name, ())
        while True:
            v = Fraction(r.randint(-250, 250), 97)
            if all(abs(v - Fraction(b)) > Fraction(1, 10) for b in banned):
                return v

    def sample_point(self, names, r: random.Random) -> dict:
        point = {}
        for name in sorted(names):
            if name in VARIABLES or name in JET_ORDER:
                point[name] = Fraction(r.randint(20, 190), 97) * r.choice((-1, 1))
            else:
                point[name] = self.sample_parameter(name, r)
        return point


def _derive_seed(seed: int, tag: str) -> int:
    import hashlib

    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def evaluate(e: Expr, ctx: EvalContext, point: dict) -> float:
    """Real value of ``e`` at ``point``; unbound parameters are sampled from ``ctx``.

    Raises DomainError when the point is outside the real domain.
    """
    missing = [a for a in e.atoms if a not in point]
    if missing:
        point = dict(point)
        r = ctx.rng("params|" + ",".join(sorted(missing)))
        for name in sorted(missing):
            if name in VARIABLES or name in JET_ORDER:
                raise KeyError(f"no value bound for {name}")
            point[name] = ctx.sample_parameter(name, r)
    env = {k: float(v) for k, v in point.items()}
    try:
        value = _eval(e, ctx, env)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(str(exc)) from None
    if not math.isfinite(value):
        raise DomainError("non-finite value")
    return value


def _eval(e: Expr, ctx: EvalContext, env: dict) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Atom):
        return env[e.name]
    if isinstance(e, Add):
        return math.fsum(_eval(t, ctx, env) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= _eval(f, ctx, env)
        return out
    if isinstance(e, Pow):
        b = _eval(e.base, ctx, env)
        p = _eval(e.exp, ctx, env)
        if b == 0 and p < 0:
            raise ZeroDivisionError("0 to a negative power")
        return math.pow(b, p)
    if isinstance(e, Fn):
        a = _eval(e.arg, ctx, env)
        if e.name == "exp":
            return math.exp(a)
        if e.name == "log":
            return math.log(a)
        if e.name == "abs":
            return abs(a)
        return float((a > 0) - (a < 0))
    if isinstance(e, Call):
        args = tuple(_eval(a, ctx, env) for a in e.args)
        return ctx.call_value(e.name, e.derivs, args)
    raise TypeError(type(e))


def is_zero(e: Expr, ctx: EvalContext, max_attempts: int | None = None) -> ZeroVerdict:
    """Decide whether ``e`` vanishes identically.

    Structural tier: the fully expanded, denominator-cleared form is the
    literal 0.  Numeric tier: evaluate at ``ctx.sample_count`` random points;
    any value beyond ``tolerance * (1 + scale)`` is a witness of nonvanishing,
    where scale is the sum of the absolute values of the expanded terms.
    """
    if cleared_form(e).is_zero:
        return ProvablyZero()
    if ctx.tolerance <= 0:
        return NumericallyZero(0, 0.0)
    terms = expand(e)
    terms = terms.terms if isinstance(terms, Add) else (terms,)
    r = ctx.rng("zero|" + render(e))
    names = e.atoms
    attempts = max_attempts or 60 * ctx.sample_count
    worst = 0.0
    done = 0
    for _ in range(attempts):
        if done >= ctx.sample_count:
            break
        point = ctx.sample_point(names, r)
        try:
            vals = [evaluate(t, ctx, point) for t in terms]
        except DomainError:
            continue
        value = math.fsum(vals)
        scale = math.fsum(abs(v) for v in vals)
        if abs(value) > ctx.tolerance * (1.0 + scale):
            try:
                direct = evaluate(e, ctx, point)
            except DomainError:
                direct = value
            return ProvablyNonzero(witness=point, value=direct)
        worst = max(worst, abs(value) / (1.0 + scale))
        done += 1
    return NumericallyZero(done, worst)
