# tests/test_exact_math.py

from fractions import Fraction

import numpy as np
import pytest

from src.exact_math import (
    LinearConstraint,
    LpStatus,
    RatPoint,
    affine_rank,
    as_rat,
    centroid,
    determinant,
    in_convex_hull,
    is_convex_combination,
    iterated_barycenter,
    lp_max,
    midpoint,
    rank,
    simplex_volume,
    squared_distance,
)

F = Fraction

# --- Coercion ---


@pytest.mark.parametrize(
    "raw, expected",
    [(3, F(3)), ("2/6", F(1, 3)), ([3, 9], F(1, 3)), ((-1, 2), F(-1, 2)), (F(5, 7), F(5, 7))],
)
def test_as_rat_accepts_exact_inputs(raw, expected):
    assert as_rat(raw) == expected


@pytest.mark.parametrize("raw", [0.5, True, [1.0, 2], [1, 2, 3], None])
def test_as_rat_rejects_inexact_inputs(raw):
    with pytest.raises(TypeError):
        as_rat(raw)


def test_as_rat_zero_denominator():
    with pytest.raises(ValueError, match="Zero denominator"):
        as_rat([1, 0])


# --- Points ---


def test_midpoint_and_iterated_barycenter():
    e1, e2, e3 = RatPoint.unit(3, 0), RatPoint.unit(3, 1), RatPoint.unit(3, 2)
    assert midpoint(e1, e2) == RatPoint.of("1/2", "1/2", 0)
    # v_1 gets weight 1/4, v_2 1/4, v_3 1/2
    assert iterated_barycenter([e1, e2, e3]) == RatPoint.of("1/4", "1/4", "1/2")
    assert iterated_barycenter([e3]) == e3


def test_iterated_barycenter_empty_raises():
    with pytest.raises(ValueError):
        iterated_barycenter([])


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError, match="Dimension mismatch"):
        RatPoint.of(1, 2) + RatPoint.of(1, 2, 3)


def test_centroid_and_distance():
    pts = [RatPoint.of(0, 0), RatPoint.of(2, 0), RatPoint.of(0, 2)]
    assert centroid(pts) == RatPoint.of("2/3", "2/3")
    assert squared_distance(pts[1], pts[2]) == 8


# --- Linear programming ---


def test_lp_max_simple_optimum():
    # max x + y  s.t. x + 2y <= 4, 3x + y <= 6
    result = lp_max(
        [1, 1],
        [LinearConstraint.of([1, 2], "<=", 4), LinearConstraint.of([3, 1], "<=", 6)],
    )
    assert result.status is LpStatus.FEASIBLE
    assert result.value == F(14, 5)
    assert result.solution == (F(8, 5), F(6, 5))


def test_lp_max_equality_and_ge_constraints():
    result = lp_max([-1, 0], [LinearConstraint.of([1, 1], "==", 1), LinearConstraint.of([0, 1], ">=", "1/3")])
    assert result.feasible
    assert result.solution == (F(0), F(1))


def test_lp_max_infeasible():
    result = lp_max([1], [LinearConstraint.of([1], "<=", 1), LinearConstraint.of([1], ">=", 2)])
    assert result.status is LpStatus.INFEASIBLE
    assert result.solution is None


def test_lp_max_unbounded():
    result = lp_max([1, 0], [LinearConstraint.of([0, 1], "<=", 1)])
    assert result.status is LpStatus.UNBOUNDED


def test_lp_max_width_mismatch():
    with pytest.raises(ValueError):
        lp_max([1, 1], [LinearConstraint.of([1], "<=", 1)])


def test_linear_constraint_unknown_sense():
    with pytest.raises(ValueError, match="Unknown constraint sense"):
        LinearConstraint.of([1], "<", 1)


@pytest.mark.parametrize("seed", range(15))
def test_lp_max_matches_vertex_enumeration(seed, vertex_enumeration_max):
    rng = np.random.default_rng(400 + seed)
    width = int(rng.integers(1, 4))
    rows = [[int(a) for a in rng.integers(-2, 4, size=width)] for _ in range(int(rng.integers(1, 4)))]
    rows.append([1] * width)
    rhs = [int(b) for b in rng.integers(0, 6, size=len(rows))]
    objective = [int(c) for c in rng.integers(-3, 5, size=width)]

    result = lp_max(objective, [LinearConstraint.of(row, "<=", b) for row, b in zip(rows, rhs)])
    assert result.status is LpStatus.FEASIBLE
    assert result.value == vertex_enumeration_max(objective, rows, rhs)
    assert all(x >= 0 for x in result.solution)
    assert all(sum(F(a) * x for a, x in zip(row, result.solution)) <= b for row, b in zip(rows, rhs))
    assert sum(F(c) * x for c, x in zip(objective, result.solution)) == result.value


# --- Convex hulls ---


def test_in_convex_hull_returns_verifiable_coefficients():
    gens = [RatPoint.unit(3, 0), RatPoint.unit(3, 1), RatPoint.unit(3, 2)]
    p = RatPoint.of("1/3", "1/3", "1/3")
    coeffs = in_convex_hull(p, gens)
    assert coeffs == [F(1, 3)] * 3
    assert is_convex_combination(p, gens, coeffs)


def test_in_convex_hull_redundant_generators():
    square = [RatPoint.of(0, 0), RatPoint.of(1, 0), RatPoint.of(1, 1), RatPoint.of(0, 1)]
    p = RatPoint.of("1/2", "1/4")
    coeffs = in_convex_hull(p, square)
    assert coeffs is not None
    assert is_convex_combination(p, square, coeffs)


def test_in_convex_hull_outside_and_boundary():
    seg = [RatPoint.of(0, 0), RatPoint.of(2, 2)]
    assert in_convex_hull(RatPoint.of(1, 2), seg) is None
    assert in_convex_hull(RatPoint.of(3, 3), seg) is None
    assert in_convex_hull(RatPoint.of(2, 2), seg) == [F(0), F(1)]


def test_in_convex_hull_single_generator():
    g = [RatPoint.of(1, 1)]
    assert in_convex_hull(RatPoint.of(1, 1), g) == [F(1)]
    assert in_convex_hull(RatPoint.of(1, 0), g) is None


def test_is_convex_combination_rejects_bad_coefficients():
    gens = [RatPoint.of(0), RatPoint.of(1)]
    assert not is_convex_combination(RatPoint.of("1/2"), gens, [F(3, 2), F(-1, 2)])
    assert not is_convex_combination(RatPoint.of("1/2"), gens, [F(1, 2), F(1, 3)])


# --- Linear algebra ---


def test_rank_determinant_and_volume():
    assert rank([[F(1), F(2)], [F(2), F(4)]]) == 1
    assert determinant([[F(2), F(1)], [F(1), F(3)]]) == 5
    assert determinant([[F(0), F(1)], [F(1), F(0)]]) == -1
    tri = [RatPoint.of(0, 0), RatPoint.of(1, 0), RatPoint.of(0, 1)]
    assert affine_rank(tri) == 2
    assert simplex_volume(tri, (0, 1)) == F(1, 2)


def test_simplex_volume_arity_check():
    with pytest.raises(ValueError):
        simplex_volume([RatPoint.of(0, 0), RatPoint.of(1, 0)], (0, 1))
