"""Exact rational arithmetic used by every geometric decision.

Provides:
- `RatPoint`, an immutable coordinate vector over `fractions.Fraction`.
- Midpoints and the left-folded iterated barycenter b(v_1, ..., v_m).
- `lp_max`, a two-phase simplex method with Bland's rule in exact arithmetic.
- `in_convex_hull`, exact convex-hull membership returning the coefficients.
- Small linear-algebra helpers (rank, determinant, projected simplex volume).

No floating point is used anywhere in this module.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, List, Sequence, Union

logger = logging.getLogger(__name__)

RatLike = Union[int, Fraction, str, Sequence[int]]

SENSES = ("<=", ">=", "==")


def as_rat(value: RatLike) -> Fraction:
    """Coerces an integer, Fraction, ``"a/b"`` string or ``[num, den]`` pair to a Fraction.

    Floats are rejected.

    Raises:
        TypeError: For unsupported input types (floats, bools, nested junk).
        ValueError: For a zero denominator or an unparsable string.
    """
    if isinstance(value, bool):
        raise TypeError(f"Cannot interpret boolean {value!r} as a rational")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if isinstance(num, bool) or isinstance(den, bool) or not isinstance(num, int) or not isinstance(den, int):
            raise TypeError(f"Rational pair must hold two integers, got {value!r}")
        if den == 0:
            raise ValueError(f"Zero denominator in rational pair {value!r}")
        return Fraction(num, den)
    raise TypeError(f"Cannot interpret {value!r} as a rational")


def rat_pair(value: Fraction) -> List[int]:
    """Serializes a Fraction as ``[numerator, denominator]``."""
    return [value.numerator, value.denominator]


# --- Points ---


@dataclass(frozen=True)
class RatPoint:
    """Exact point in R^dim."""

    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not all(type(c) is Fraction for c in self.coords):
            object.__setattr__(self, "coords", tuple(as_rat(c) for c in self.coords))

    @classmethod
    def of(cls, *values: RatLike) -> RatPoint:
        return cls(tuple(as_rat(v) for v in values))

    @classmethod
    def unit(cls, dim: int, index: int) -> RatPoint:
        """Standard basis vector e_{index+1} in R^dim (index is 0-based)."""
        return cls(tuple(Fraction(1) if j == index else Fraction(0) for j in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, index: int) -> Fraction:
        return self.coords[index]

    def __add__(self, other: RatPoint) -> RatPoint:
        _check_dims(self, other)
        return RatPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: RatPoint) -> RatPoint:
        _check_dims(self, other)
        return RatPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, factor: RatLike) -> RatPoint:
        c = as_rat(factor)
        return RatPoint(tuple(c * a for a in self.coords))

    def dot(self, other: RatPoint) -> Fraction:
        _check_dims(self, other)
        return sum((a * b for a, b in zip(self.coords, other.coords)), Fraction(0))

    def sq_norm(self) -> Fraction:
        return self.dot(self)

    def to_pairs(self) -> List[List[int]]:
        return [rat_pair(c) for c in self.coords]

    def __repr__(self) -> str:
        return "RatPoint(" + ", ".join(str(c) for c in self.coords) + ")"


def _check_dims(a: RatPoint, b: RatPoint) -> None:
    if a.dim != b.dim:
        raise ValueError(f"Dimension mismatch: {a.dim} vs {b.dim}")


def midpoint(a: RatPoint, b: RatPoint) -> RatPoint:
    """Returns (a + b) / 2 exactly."""
    _check_dims(a, b)
    return RatPoint(tuple((x + y) / 2 for x, y in zip(a.coords, b.coords)))


def iterated_barycenter(points: Sequence[RatPoint]) -> RatPoint:
    """Left fold of midpoints: b(v_1, ..., v_m) = b(b(v_1, ..., v_{m-1}), v_m).

    Args:
        points (Sequence[RatPoint]): Nonempty list of points of equal dimension.

    Returns:
        RatPoint: The weighted average with v_1 weighted 1/2^{m-1}.
    """
    if not points:
        raise ValueError("iterated_barycenter needs at least one point")
    if len(points) == 1:
        _check_dims(points[0], points[0])
        return points[0]
    return reduce(midpoint, points[1:], points[0])


def squared_distance(a: RatPoint, b: RatPoint) -> Fraction:
    return (a - b).sq_norm()


def centroid(points: Sequence[RatPoint]) -> RatPoint:
    """Arithmetic mean of the points (the barycenter of their convex hull's vertex set)."""
    if not points:
        raise ValueError("centroid needs at least one point")
    dim = points[0].dim
    for pt in points:
        if pt.dim != dim:
            raise ValueError(f"Dimension mismatch: {pt.dim} vs {dim}")
    count = len(points)
    return RatPoint(tuple(sum((pt[c] for pt in points), Fraction(0)) / count for c in range(dim)))


# --- Linear programming ---


class LpStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearConstraint:
    """coeffs · x (sense) rhs, with sense one of ``<=``, ``>=``, ``==``."""

    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction

    @classmethod
    def of(cls, coeffs: Sequence[RatLike], sense: str, rhs: RatLike) -> LinearConstraint:
        if sense not in SENSES:
            raise ValueError(f"Unknown constraint sense {sense!r}; expected one of {SENSES}")
        return cls(tuple(as_rat(c) for c in coeffs), sense, as_rat(rhs))


@dataclass(frozen=True)
class LpResult:
    """Outcome of `lp_max`; `solution` and `value` are set only when FEASIBLE."""

    status: LpStatus
    solution: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status is LpStatus.FEASIBLE


def _pivot(rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int], r: int, col: int) -> None:
    piv = rows[r][col]
    rows[r] = [v / piv for v in rows[r]]
    rhs[r] = rhs[r] / piv
    pivot_row = rows[r]
    for i, row in enumerate(rows):
        if i == r:
            continue
        factor = row[col]
        if factor != 0:
            rows[i] = [a - factor * p for a, p in zip(row, pivot_row)]
            rhs[i] = rhs[i] - factor * rhs[r]
    basis[r] = col


def _run_simplex(
    rows: List[List[Fraction]],
    rhs: List[Fraction],
    basis: List[int],
    cost: List[Fraction],
    allowed: Sequence[int],
) -> LpStatus:
    """Maximizes cost · x over the tableau in place (Bland's rule)."""
    while True:
        in_basis = set(basis)
        entering = -1
        for j in allowed:
            if j in in_basis:
                continue
            reduced = cost[j] - sum((cost[basis[i]] * rows[i][j] for i in range(len(rows))), Fraction(0))
            if reduced > 0:
                entering = j
                break
        if entering < 0:
            return LpStatus.FEASIBLE

        leaving = -1
        best_ratio = Fraction(0)
        for i, row in enumerate(rows):
            a = row[entering]
            if a <= 0:
                continue
            ratio = rhs[i] / a
            if leaving < 0 or ratio < best_ratio or (ratio == best_ratio and basis[i] < basis[leaving]):
                leaving = i
                best_ratio = ratio
        if leaving < 0:
            return LpStatus.UNBOUNDED
        _pivot(rows, rhs, basis, leaving, entering)


def lp_max(objective: Sequence[RatLike], constraints: Sequence[LinearConstraint]) -> LpResult:
    """Maximizes objective · x subject to the constraints and x >= 0.

    Two-phase textbook simplex over Fractions. Phase one minimizes the sum
    of artificial variables; phase two optimizes the objective with the
    artificial columns frozen out.

    Args:
        objective (Sequence[RatLike]): Objective coefficients, one per variable.
        constraints (Sequence[LinearConstraint]): Rational (in)equalities.

    Returns:
        LpResult: FEASIBLE with an optimal vertex, INFEASIBLE, or UNBOUNDED.

    Raises:
        ValueError: If a constraint's width differs from the objective's.
    """
    c = [as_rat(v) for v in objective]
    n = len(c)
    for con in constraints:
        if len(con.coeffs) != n:
            raise ValueError(f"Constraint has {len(con.coeffs)} coefficients, objective has {n}")
        if con.sense not in SENSES:
            raise ValueError(f"Unknown constraint sense {con.sense!r}")

    # Normalize to nonnegative right-hand sides.
    norm: List[tuple[List[Fraction], str, Fraction]] = []
    for con in constraints:
        coeffs, sense, b = list(con.coeffs), con.sense, con.rhs
        if b < 0:
            coeffs = [-a for a in coeffs]
            b = -b
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        norm.append((coeffs, sense, b))

    m = len(norm)
    n_slack = sum(1 for _, sense, _ in norm if sense != "==")
    n_art = sum(1 for _, sense, _ in norm if sense != "<=")
    width = n + n_slack + n_art

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    basis: List[int] = []
    artificial: set[int] = set()
    slack_col = n
    art_col = n + n_slack
    for coeffs, sense, b in norm:
        row = coeffs + [Fraction(0)] * (n_slack + n_art)
        if sense == "<=":
            row[slack_col] = Fraction(1)
            basis.append(slack_col)
            slack_col += 1
        else:
            if sense == ">=":
                row[slack_col] = Fraction(-1)
                slack_col += 1
            row[art_col] = Fraction(1)
            basis.append(art_col)
            artificial.add(art_col)
            art_col += 1
        rows.append(row)
        rhs.append(b)

    if artificial:
        phase_one = [Fraction(-1) if j in artificial else Fraction(0) for j in range(width)]
        _run_simplex(rows, rhs, basis, phase_one, range(width))
        infeasibility = sum((rhs[i] for i in range(m) if basis[i] in artificial), Fraction(0))
        if infeasibility > 0:
            logger.debug("lp_max: phase one ended with residual %s; infeasible", infeasibility)
            return LpResult(LpStatus.INFEASIBLE)
        redundant: List[int] = []
        for i in range(m):
            if basis[i] not in artificial:
                continue
            swap = next((j for j in range(width) if j not in artificial and rows[i][j] != 0), None)
            if swap is None:
                redundant.append(i)
            else:
                _pivot(rows, rhs, basis, i, swap)
        for i in reversed(redundant):
            del rows[i], rhs[i], basis[i]

    allowed = [j for j in range(width) if j not in artificial]
    cost = c + [Fraction(0)] * (width - n)
    status = _run_simplex(rows, rhs, basis, cost, allowed)
    if status is LpStatus.UNBOUNDED:
        return LpResult(LpStatus.UNBOUNDED)

    x = [Fraction(0)] * width
    for i, col in enumerate(basis):
        x[col] = rhs[i]
    solution = tuple(x[:n])
    value = sum((cj * xj for cj, xj in zip(c, solution)), Fraction(0))
    return LpResult(LpStatus.FEASIBLE, solution, value)


# --- Convex hulls ---


def is_convex_combination(p: RatPoint, generators: Sequence[RatPoint], coeffs: Sequence[Fraction]) -> bool:
    """Re-checks Σc_i = 1, c_i ≥ 0 and Σc_i·g_i = p by direct substitution."""
    if len(coeffs) != len(generators) or not generators:
        return False
    if any(c < 0 for c in coeffs) or sum(coeffs, Fraction(0)) != 1:
        return False
    for axis in range(p.dim):
        if sum((c * g[axis] for c, g in zip(coeffs, generators)), Fraction(0)) != p[axis]:
            return False
    return True


def in_convex_hull(p: RatPoint, generators: Sequence[RatPoint]) -> list[Fraction] | None:
    """Decides p ∈ conv(generators) exactly.

    Args:
        p (RatPoint): Query point.
        generators (Sequence[RatPoint]): Nonempty list of points, same dimension as p.

    Returns:
        list[Fraction] | None: Nonnegative coefficients summing to 1 with
        Σ c_i g_i = p, or None when p lies outside the hull.
    """
    if not generators:
        raise ValueError("in_convex_hull needs at least one generator")
    for g in generators:
        _check_dims(p, g)

    # Bounding-box rejection before any LP work.
    for axis in range(p.dim):
        values = [g[axis] for g in generators]
        if p[axis] < min(values) or p[axis] > max(values):
            return None
    if len(generators) == 1:
        return [Fraction(1)] if generators[0] == p else None

    width = len(generators)
    constraints = [LinearConstraint(tuple(Fraction(1) for _ in generators), "==", Fraction(1))]
    for axis in range(p.dim):
        column = tuple(g[axis] for g in generators)
        if all(v == 0 for v in column) and p[axis] == 0:
            continue
        constraints.append(LinearConstraint(column, "==", p[axis]))
    result = lp_max([0] * width, constraints)
    if not result.feasible or result.solution is None:
        return None
    return list(result.solution)


# --- Linear algebra ---


def row_reduce(matrix: Sequence[Sequence[Fraction]]) -> tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in matrix]
    pivots: List[int] = []
    if not rows:
        return rows, pivots
    width = len(rows[0])
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][col]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    return len(row_reduce(matrix)[1])


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ValueError("determinant needs a square matrix")
    rows = [list(r) for r in matrix]
    det = Fraction(1)
    for col in range(size):
        pivot = next((i for i in range(col, size) if rows[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        lead = rows[col][col]
        det *= lead
        for i in range(col + 1, size):
            factor = rows[i][col] / lead
            if factor != 0:
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return det


def affine_rank(points: Sequence[RatPoint]) -> int:
    """Dimension of the affine hull of the points."""
    if len(points) < 2:
        return 0
    base = points[0]
    return rank([list((pt - base).coords) for pt in points[1:]])


def projection_axes(points: Sequence[RatPoint]) -> tuple[int, ...]:
    """Coordinate axes onto which the affine hull of `points` projects injectively.

    Volumes computed in these coordinates differ from intrinsic volumes by a
    constant factor, which is all that volume-sum comparisons need.
    """
    if len(points) < 2:
        return ()
    base = points[0]
    _, pivots = row_reduce([list((pt - base).coords) for pt in points[1:]])
    return tuple(pivots)


def simplex_volume(points: Sequence[RatPoint], axes: Sequence[int]) -> Fraction:
    """Unsigned volume of the simplex conv(points) projected onto `axes`.

    Expects len(points) == len(axes) + 1.
    """
    if len(points) != len(axes) + 1:
        raise ValueError(f"{len(points)} points do not span a {len(axes)}-simplex")
    if not axes:
        return Fraction(1)
    base = points[0]
    matrix = [[(pt - base)[a] for a in axes] for pt in points[1:]]
    return abs(determinant(matrix)) / math.factorial(len(axes))
