"""Structure constants of vector-field realizations, invariants, identification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .jet import VectorField, lie_bracket
from .kernel import DomainError, EvalContext, ProvablyNonzero, as_expr, evaluate, is_zero
from .kernel.expr import JET_ORDER, VARIABLES

DENOMINATOR_BOUND = 1000
MAX_DIMENSION = 4


class AxiomError(ValueError):
    """Constants violate antisymmetry or the Jacobi identity."""


class DependenceError(ValueError):
    """The given fields are linearly dependent over the reals."""


class ClosureError(ValueError):
    """A bracket of two fields leaves their span."""

    def __init__(self, pair, residual: VectorField | None, message: str = ""):
        self.pair = pair
        self.residual = residual
        text = message or f"[e{pair[0] + 1}, e{pair[1] + 1}] is not in the span"
        if residual is not None:
            text += f"; leftover {residual.operator_text()}"
        super().__init__(text)


# exact linear algebra on lists of Fractions


def _reduce(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots = []
    lead = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((i for i in range(lead, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[lead], m[pivot] = m[pivot], m[lead]
        inv = 1 / m[lead][col]
        m[lead] = [v * inv for v in m[lead]]
        for i in range(len(m)):
            if i != lead and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[lead])]
        pivots.append(col)
        lead += 1
        if lead == len(m):
            break
    return m[:lead], pivots


def rank(rows) -> int:
    return len(_reduce(rows)[0]) if rows else 0


def row_space(rows) -> list:
    return _reduce(rows)[0] if rows else []


def nullspace(rows, ncols: int) -> list:
    """Basis of {x : rows @ x = 0}."""
    reduced, pivots = _reduce(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def coordinates(basis, v) -> list:
    """Coefficients of ``v`` in the independent rows ``basis``; ValueError if outside."""
    n = len(basis)
    aug = [[basis[i][k] for i in range(n)] + [v[k]] for k in range(len(v))]
    reduced, pivots = _reduce(aug)
    if n in pivots:
        raise ValueError("vector not in span")
    out = [Fraction(0)] * n
    for row, p in zip(reduced, pivots):
        out[p] = row[n]
    return out


def inverse(matrix) -> list:
    n = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    reduced, pivots = _reduce(aug)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise ValueError("singular matrix")
    return [row[n:] for row in reduced]


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))] for i in range(len(a))]


def _trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def inertia(sym) -> tuple:
    """(positive, negative, zero) counts of a symmetric rational matrix, by congruence."""
    a = [list(map(Fraction, row)) for row in sym]
    n = len(a)
    pos = neg = 0
    size = n
    for _ in range(n):
        if size == 0:
            break
        idx = next((i for i in range(size) if a[i][i] != 0), None)
        if idx is None:
            # no nonzero diagonal: combine rows to create one, or the block is zero
            pair = next(((i, j) for i in range(size) for j in range(i + 1, size) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] = row[i] + row[j]
            idx = i
        a[0], a[idx] = a[idx], a[0]
        for row in a:
            row[0], row[idx] = row[idx], row[0]
        d = a[0][0]
        pos += d > 0
        neg += d < 0
        rest = [[a[i][j] - a[i][0] * a[0][j] / d for j in range(1, size)] for i in range(1, size)]
        a = rest
        size -= 1
    return pos, neg, n - pos - neg


# presentations


@dataclass(frozen=True)
class AlgebraPresentation:
    """[e_i, e_j] = sum_k constants[i][j][k] e_k, exact rationals."""

    constants: tuple
    labels: tuple = ()

    def __post_init__(self):
        n = len(self.constants)
        c = tuple(tuple(tuple(Fraction(v) for v in row) for row in plane) for plane in self.constants)
        object.__setattr__(self, "constants", c)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(n)))
        if len(self.labels) != n:
            raise ValueError("one label per basis element")
        for i in range(n):
            if len(c[i]) != n or any(len(row) != n for row in c[i]):
                raise ValueError("constants must have shape n x n x n")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if c[i][j][k] != -c[j][i][k]:
                        raise AxiomError(f"antisymmetry fails at ({i}, {j}, {k})")
        for i, j, k in combinations(range(n), 3):
            for m in range(n):
                total = sum(
                    c[j][k][l] * c[i][l][m] + c[k][i][l] * c[j][l][m] + c[i][j][l] * c[k][l][m] for l in range(n)
                )
                if total != 0:
                    raise AxiomError(f"Jacobi identity fails for ({i}, {j}, {k})")

    @property
    def dimension(self) -> int:
        return len(self.constants)

    @classmethod
    def from_brackets(cls, n: int, brackets: dict, labels=()) -> "AlgebraPresentation":
        """Build from {(i, j): [coeffs]} with 0-based i < j; unspecified brackets vanish."""
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in brackets.items():
            for k, v in enumerate(vec):
                c[i][j][k] = Fraction(v)
                c[j][i][k] = -Fraction(v)
        return cls(c, tuple(labels))

    def bracket(self, x, y) -> list:
        n = self.dimension
        out = [Fraction(0)] * n
        for i in range(n):
            if x[i] == 0:
                continue
            for j in range(n):
                if y[j] == 0:
                    continue
                w = x[i] * y[j]
                for k in range(n):
                    out[k] += w * self.constants[i][j][k]
        return out

    def ad(self, x) -> list:
        """Matrix of ad x; column j is [x, e_j]."""
        n = self.dimension
        cols = [self.bracket(x, _unit(n, j)) for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def to_json(self) -> dict:
        nonzero = {}
        for i, j in combinations(range(self.dimension), 2):
            vec = self.constants[i][j]
            if any(vec):
                nonzero[f"{i + 1},{j + 1}"] = [str(v) for v in vec]
        return {"dimension": self.dimension, "labels": list(self.labels), "brackets": nonzero}

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraPresentation":
        n = int(data["dimension"])
        brackets = {}
        for key, vec in data.get("brackets", {}).items():
            i, j = (int(s) - 1 for s in key.split(","))
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"bad bracket index {key!r}")
            if len(vec) != n:
                raise ValueError(f"bracket {key!r} needs {n} coefficients")
            vals = [Fraction(v) for v in vec]
            if i > j:
                i, j, vals = j, i, [-v for v in vals]
            brackets[(i, j)] = vals
        return cls.from_brackets(n, brackets, tuple(data.get("labels", ())))

    def render(self) -> str:
        lines = []
        for i, j in combinations(range(self.dimension), 2):
            vec = self.constants[i][j]
            if any(vec):
                lines.append(f"[{self.labels[i]}, {self.labels[j]}] = {_combo(vec, self.labels)}")
        return "; ".join(lines) or "abelian"


def _unit(n, i):
    return [Fraction(int(k == i)) for k in range(n)]


def _combo(vec, labels) -> str:
    parts = []
    for v, name in zip(vec, labels):
        if v == 0:
            continue
        coeff = "" if v == 1 else "-" if v == -1 else f"{v}*"
        parts.append(f"{coeff}{name}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def change_basis(p: AlgebraPresentation, matrix) -> AlgebraPresentation:
    """Constants in the basis e'_i = sum_a matrix[i][a] e_a."""
    P = [list(map(Fraction, row)) for row in matrix]
    Q = inverse(P)
    n = p.dimension
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            old = p.bracket(P[i], P[j])
            for l in range(n):
                c[i][j][l] = sum((old[k] * Q[k][l] for k in range(n)), Fraction(0))
    return AlgebraPresentation(c)


# extraction from vector fields


def _field_values(vf: VectorField, ctx: EvalContext, point: dict) -> list:
    return [evaluate(c, ctx, point) for c in vf.components]


def _sample_points(fields, ctx: EvalContext, count: int):
    names = set()
    for vf in fields:
        for c in vf.components:
            names |= c.atoms
    r = ctx.rng("constants|" + "|".join(vf.render() for vf in fields))
    params = {n: ctx.sample_parameter(n, r) for n in sorted(names) if n not in VARIABLES and n not in JET_ORDER}
    coords = sorted(n for n in names if n in VARIABLES or n == "u") or ["t"]
    points = []
    for _ in range(count * 50):
        if len(points) == count:
            break
        pt = dict(params)
        for n in coords:
            pt[n] = ctx.sample_point([n], r)[n]
        pt.setdefault("u", ctx.sample_point(["u"], r)["u"])
        try:
            for vf in fields:
                _field_values(vf, ctx, pt)
        except DomainError:
            continue
        points.append(pt)
    return points


def structure_constants(fields, ctx: EvalContext, labels=()) -> AlgebraPresentation:
    """Express every pairwise bracket in the span of ``fields`` with exact rationals.

    Coefficients come from a least-squares fit on values at random points,
    are rounded to rationals with bounded denominators, and are then
    confirmed by zero-testing the leftover field symbolically.
    """
    fields = list(fields)
    n = len(fields)
    if n == 0:
        return AlgebraPresentation(())
    if n > MAX_DIMENSION:
        raise ValueError(f"at most {MAX_DIMENSION} fields supported")
    count = max(6, 2 * n)
    points = _sample_points(fields, ctx, count)
    if len(points) < n:
        raise DomainError("could not find enough evaluation points")

    def stacked(vfs):
        return np.array([[v for pt in points for v in _field_values(vf, ctx, pt)] for vf in vfs]).T

    A = stacked(fields)
    scale = max(1.0, float(np.abs(A).max()))
    if np.linalg.matrix_rank(A, tol=1e-8 * scale) < n:
        raise DependenceError("fields are linearly dependent")
    brackets = {}
    for i, j in combinations(range(n), 2):
        b = lie_bracket(fields[i], fields[j])
        try:
            rhs = stacked([b])[:, 0]
        except DomainError:
            rhs = None
        coeffs = [Fraction(0)] * n
        if rhs is not None:
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            fit = np.abs(A @ sol - rhs).max()
            if fit > 1e-6 * (1.0 + float(np.abs(rhs).max())):
                raise ClosureError((i, j), _leftover(b, fields, coeffs))
            coeffs = [Fraction(float(s)).limit_denominator(DENOMINATOR_BOUND) for s in sol]
        leftover = _leftover(b, fields, coeffs)
        if any(isinstance(is_zero(c, ctx), ProvablyNonzero) for c in leftover.components):
            raise ClosureError((i, j), leftover, "rational reconstruction failed symbolic check")
        brackets[(i, j)] = coeffs
    return AlgebraPresentation.from_brackets(n, brackets, tuple(labels))


def _leftover(b: VectorField, fields, coeffs) -> VectorField:
    out = b
    for c, vf in zip(coeffs, fields):
        if c:
            out = out - vf.scale(as_expr(c))
    return out


# invariants and identification


@dataclass(frozen=True)
class AlgebraInvariants:
    dimension: int
    derived_dimension: int
    center_dimension: int
    derived_abelian: bool
    center_meets_derived: int
    killing_rank: int
    killing_signature: tuple  # (positive, negative, zero)
    derived_action: str  # description of ad acting on an abelian derived algebra

    def summary(self) -> str:
        pos, neg, zero = self.killing_signature
        return (
            f"dim {self.dimension}, derived dim {self.derived_dimension}"
            f"{' (abelian)' if self.derived_abelian else ''}, center dim {self.center_dimension}, "
            f"Killing signature (+{pos}, -{neg}, 0:{zero}), action {self.derived_action}"
        )


def killing_form(p: AlgebraPresentation) -> list:
    n = p.dimension
    ads = [p.ad(_unit(n, i)) for i in range(n)]
    return [[_trace(_matmul(ads[i], ads[j])) for j in range(n)] for i in range(n)]


def derived_basis(p: AlgebraPresentation) -> list:
    n = p.dimension
    return row_space([list(p.constants[i][j]) for i, j in combinations(range(n), 2)])


def center_basis(p: AlgebraPresentation) -> list:
    n = p.dimension
    rows = [[p.constants[i][j][k] for i in range(n)] for j in range(n) for k in range(n)]
    return nullspace(rows, n)


def _restricted_ads(p: AlgebraPresentation, sub) -> list:
    """Matrices of ad e_i restricted to the invariant subspace spanned by ``sub``."""
    n = p.dimension
    mats = []
    for i in range(n):
        cols = [coordinates(sub, p.bracket(_unit(n, i), d)) for d in sub]
        mats.append([[cols[b][a] for b in range(len(sub))] for a in range(len(sub))])
    return mats


def _classify_action(mats) -> str:
    """Describe the span of 2x2 restricted ad matrices acting on a 2-dim ideal."""
    flat = row_space([[m[0][0], m[0][1], m[1][0], m[1][1]] for m in mats])
    if not flat:
        return "trivial"
    if len(flat) == 1:
        m = flat[0]
        tr = m[0] + m[3]
        det = m[0] * m[3] - m[1] * m[2]
        disc = tr * tr - 4 * det
        if disc == 0 and m[1] == 0 and m[2] == 0:
            return "scalar"
        if tr == 0 and det < 0:
            return "opposite"
        if disc > 0:
            return "real-distinct"
        if disc < 0:
            return "complex"
        return "nondiagonalizable"
    if len(flat) == 2:
        identity = [Fraction(1), Fraction(0), Fraction(0), Fraction(1)]
        try:
            coordinates(flat, identity)
        except ValueError:
            return "two-dim"
        for m in flat:
            tr = m[0] + m[3]
            det = m[0] * m[3] - m[1] * m[2]
            if tr * tr - 4 * det > 0:
                return "diagonal"
        return "two-dim"
    return f"{len(flat)}-dim"


def algebra_invariants(p: AlgebraPresentation) -> AlgebraInvariants:
    n = p.dimension
    derived = derived_basis(p)
    center = center_basis(p)
    abelian = all(not any(p.bracket(a, b)) for a, b in combinations(derived, 2))
    meets = len(derived) + len(center) - rank(derived + center) if derived or center else 0
    killing = killing_form(p)
    signature = inertia(killing) if n else (0, 0, 0)
    action = "n/a"
    if abelian and len(derived) == 2:
        action = _classify_action(_restricted_ads(p, derived))
    return AlgebraInvariants(
        n, len(derived), len(center), abelian, meets, rank(killing) if n else 0, signature, action
    )


@dataclass(frozen=True)
class ClassLabel:
    name: str
    detail: str = ""

    def __str__(self) -> str:
        return self.name if not self.detail else f"{self.name} ({self.detail})"


LABELS = ("A_1", "A_2.1", "A_2.2", "sl(2,R)", "so(3)", "A_3.6", "A_2.2+A_1", "A_2.2+A_2.2", "Unknown")


def identify_class(p: AlgebraPresentation) -> ClassLabel:
    inv = algebra_invariants(p)
    n = inv.dimension
    if n == 1:
        return ClassLabel("A_1")
    if n == 2:
        return ClassLabel("A_2.1" if inv.derived_dimension == 0 else "A_2.2")
    if n == 3:
        if inv.derived_dimension == 3:
            pos, neg, _ = inv.killing_signature
            if neg == 3:
                return ClassLabel("so(3)")
            if pos and neg:
                return ClassLabel("sl(2,R)")
        if inv.derived_dimension == 2 and inv.derived_abelian and inv.derived_action in ("opposite", "scalar"):
            return ClassLabel("A_3.6")
        if inv.derived_dimension == 1 and inv.center_dimension == 1 and inv.center_meets_derived == 0:
            return ClassLabel("A_2.2+A_1")
    if n == 4:
        if (
            inv.derived_dimension == 2
            and inv.derived_abelian
            and inv.center_dimension == 0
            and inv.derived_action == "diagonal"
        ):
            return ClassLabel("A_2.2+A_2.2")
    return ClassLabel("Unknown", inv.summary())


def normalize_label(text: str) -> str:
    """Map loose spellings (``sl2R``, ``A_{2.2} (+) A_1``) onto the names in LABELS."""
    t = text.replace("{", "").replace("}", "").replace(" ", "").replace("\\oplus", "+").replace("(+)", "+")
    t = t.replace("⊕", "+")
    aliases = {"sl2R": "sl(2,R)", "sl(2,R)": "sl(2,R)", "so3": "so(3)", "so(3)": "so(3)"}
    if t in aliases:
        return aliases[t]
    if t.startswith("A") and not t.startswith("A_"):
        t = "A_" + t[1:]
    return t
