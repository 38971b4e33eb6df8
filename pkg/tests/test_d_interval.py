# tests/test_d_interval.py

from fractions import Fraction

import pytest

from src.config import settings
from src.d_interval import (
    DInterval,
    PiercingInstance,
    Variant,
    check_hypothesis,
    default_eps,
    interval_cover_oracle,
    normalize,
    pierce,
    piercing_hypergraph,
    prefix_points,
    raw_members,
    select_disjoint,
    separated_cover_oracle,
)
from src.errors import HypothesisViolation
from src.exact_math import RatPoint
from src.hypergraph import covering_number
from src.validation import validate_matching

F = Fraction

# --- Fixtures ---


@pytest.fixture
def points_instance():
    """d = 1, k = n = 3: each family is three distinct points, all nine distinct."""
    families = [[[[z, z]] for z in (i, i + 3, i + 6)] for i in (1, 2, 3)]
    return PiercingInstance.build("general", 1, families, k=3)


@pytest.fixture
def pairs_instance():
    """d = 2, k = n = 3: members are unions of two distinct points."""
    families = []
    for i in range(1, 4):
        family = []
        for j in range(3):
            a = 3 * (i - 1) + j + 1
            family.append([[a, a], [a + 9, a + 9]])
        families.append(family)
    return PiercingInstance.build("general", 2, families, k=3)


@pytest.fixture
def separated_instance():
    """m = 2, d = 2, n = 3: component t of every member sits in (t-1, t)."""
    families = []
    for i in range(1, 4):
        family = []
        for j in range(3):
            a = F(3 * (i - 1) + j + 1, 10)
            family.append([[a, a], [1 + a, 1 + a]])
        families.append(family)
    return PiercingInstance.build(Variant.SEPARATED, 2, families, m=2)


@pytest.fixture(scope="module")
def three_piece_instance():
    """m = 3, d = 2, n = 5: each family is five members, one point per cake, all points distinct."""
    families = []
    for i in range(1, 6):
        family = []
        for j in range(5):
            a = F(5 * (i - 1) + j + 1, 30)
            family.append([[a, a], [1 + a, 1 + a]])
        families.append(family)
    return PiercingInstance.build(Variant.SEPARATED, 2, families, m=3)


@pytest.fixture
def rotated_instance():
    """m = 2, d = 2, n = 3: the second point of member j repeats the first point of member j+1, one cake later.

    Raw, every family needs three piercing points. Overlaying both cakes on (0, 1)
    would let two points pierce each family.
    """
    families = []
    for i in range(1, 4):
        a = [F(3 * (i - 1) + j + 1, 10) for j in range(3)]
        families.append([[[a[j], a[j]], [1 + a[(j + 1) % 3], 1 + a[(j + 1) % 3]]] for j in range(3)])
    return PiercingInstance.build(Variant.SEPARATED, 2, families, m=2)


# --- Model ---


def test_d_interval_validation():
    with pytest.raises(ValueError, match="inverted"):
        DInterval(1, 0, ((F(2), F(1)),))
    with pytest.raises(ValueError, match="no components"):
        DInterval(1, 0, ())


def test_disjointness_and_containment():
    f = DInterval(1, 0, ((F(0), F(1)), (F(3), F(4))))
    g = DInterval(2, 0, ((F(1), F(2)),))
    h = DInterval(2, 1, ((F(2), F(5, 2)),))
    assert f.contains_point(F(7, 2))
    assert not f.contains_point(F(2))
    # closed intervals sharing an endpoint intersect
    assert not f.disjoint_from(g)
    assert f.disjoint_from(h)


def test_instance_validation():
    with pytest.raises(ValueError, match="needs k"):
        PiercingInstance.build("general", 1, [[[[0, 1]]]])
    with pytest.raises(ValueError, match="d < k"):
        PiercingInstance.build("general", 3, [[[[0, 1]]]] * 3, k=3)
    with pytest.raises(ValueError, match="n >= k"):
        PiercingInstance.build("general", 1, [[[[0, 1]]]] * 2, k=3)
    with pytest.raises(ValueError, match="more than d"):
        PiercingInstance.build("general", 1, [[[[0, 1], [2, 3]]]] * 3, k=3)
    with pytest.raises(ValueError, match="m >= 2"):
        PiercingInstance.build("separated", 1, [[[["1/2", "1/2"]]]], m=1)
    with pytest.raises(ValueError, match="not inside"):
        PiercingInstance.build("separated", 1, [[[[0, "1/2"]]]] * 2, m=2)


def test_general_variant_rejects_d_at_least_k():
    # d = k = 2: at x = (1/2, 1/2) both members miss the cut point, so only T = {1, 2} = P could witness them
    families = [[[[1, 1], [5, 5]]], [[[2, 2], [6, 6]]]]
    with pytest.raises(ValueError, match="not a proper face"):
        PiercingInstance.build("general", 2, families, k=2)
    PiercingInstance.build("general", 1, [[[[1, 1]], [[5, 5]]], [[[2, 2]], [[6, 6]]]], k=2)


def test_instance_parameters(points_instance, pairs_instance, separated_instance):
    assert points_instance.guaranteed_size == 3
    assert points_instance.subset_size == 1
    assert pairs_instance.guaranteed_size == 1
    assert separated_instance.solver_k == 3
    assert separated_instance.required_cover == 3
    assert separated_instance.guaranteed_size == 2
    assert separated_instance.polytope().factor_sizes == (2, 2)


# --- Normalization and covers ---


def test_normalize_general_maps_into_unit_interval(points_instance):
    norm = normalize(points_instance)
    assert norm.normalized
    # [0, 10] onto [0, 1]
    assert norm.member((1, 0)).components == ((F(1, 10), F(1, 10)),)
    assert normalize(norm) is norm


def test_normalize_separated_translates_components(separated_instance):
    norm = normalize(separated_instance)
    assert norm.member((1, 0)).components == ((F(1, 10), F(1, 10)), (F(1, 10), F(1, 10)))


def test_default_eps_uses_smallest_gap(points_instance, monkeypatch):
    monkeypatch.setattr(settings, "EPS_GAP_DIVISOR", 64)
    assert default_eps(points_instance) == F(1, 640)


def test_prefix_points():
    assert prefix_points([F(1, 4), F(1, 4), F(1, 2)]) == [F(1, 4), F(1, 2), F(1)]
    with pytest.raises(ValueError, match="standard simplex"):
        prefix_points([F(1, 2), F(1, 4)])


def test_interval_cover_witnesses(points_instance):
    oracle = interval_cover_oracle(points_instance)
    P = oracle.polytope
    x = RatPoint.of("1/3", "1/3", "1/3")
    # piece 1 is (0, 1/3): only the point 1/10 of family 1 fits
    assert [f.key for f in oracle.witnesses(1, P.face_id_of([0]), x)] == [(1, 0)]
    # piece 3 is (2/3, 1): 7/10
    assert [f.key for f in oracle.witnesses(1, P.face_id_of([2]), x)] == [(1, 2)]
    # d = 1: two-piece faces are empty
    assert not oracle.query(1, P.face_id_of([0, 1]), x)


def test_separated_cover_witnesses(separated_instance):
    oracle = separated_cover_oracle(separated_instance)
    P = oracle.polytope
    x = RatPoint.of("1/2", "1/2", "1/2", "1/2")
    first = P.vertex_labels.index((1, 1))
    assert [f.key for f in oracle.witnesses(1, P.face_id_of([first]), x)] == [(1, 0), (1, 1), (1, 2)]
    assert oracle.witnesses(3, P.face_id_of([first]), x) == []


# --- Hypothesis ---


def test_piercing_hypergraph_matches_piercing_number():
    members = [DInterval(1, j, ((F(a), F(b)),)) for j, (a, b) in enumerate([(0, 2), (1, 3), (4, 5)])]
    H, points = piercing_hypergraph(members)
    assert points == [F(2), F(3), F(5)]
    assert covering_number(H) == 2


def test_check_hypothesis_passes(points_instance):
    check_hypothesis(points_instance)


def test_check_hypothesis_reports_failing_subset():
    # family 2 is pierced by the single point 1
    families = [[[[z, z]] for z in (1, 4, 7)], [[[0, 1]], [["1/2", 2]]], [[[z, z]] for z in (3, 6, 9)]]
    instance = PiercingInstance.build("general", 1, families, k=3)
    with pytest.raises(HypothesisViolation) as excinfo:
        check_hypothesis(instance)
    assert excinfo.value.colors == (2,)
    assert len(excinfo.value.cover) == 1
    assert excinfo.value.required == 3
    with pytest.raises(HypothesisViolation):
        pierce(instance)


def test_check_hypothesis_cap(points_instance, monkeypatch):
    monkeypatch.setattr(settings, "HYPOTHESIS_FAMILY_CAP", 2)
    with pytest.raises(ValueError, match="capped"):
        check_hypothesis(points_instance)
    check_hypothesis(points_instance, enforce_cap=False)


def test_check_hypothesis_keeps_cakes_apart(rotated_instance):
    check_hypothesis(rotated_instance)
    norm = normalize(rotated_instance)
    check_hypothesis(norm)
    # overlaid on one line, two points would pierce family 1
    overlaid = PiercingInstance.build(
        "general", 2, [[list(map(list, f.components)) for f in family] for family in norm.families], k=3
    )
    with pytest.raises(HypothesisViolation) as excinfo:
        check_hypothesis(overlaid)
    assert len(excinfo.value.cover) == 2


# --- Pierce ---


def test_select_disjoint_backtracks():
    a = DInterval(1, 0, ((F(0), F(2)),))
    b = DInterval(1, 1, ((F(5), F(6)),))
    c = DInterval(2, 0, ((F(1), F(3)),))
    assert select_disjoint([[a, b], [c]]) == [b, c]
    assert select_disjoint([[a], [c]]) is None


def test_pierce_point_families(points_instance):
    result = pierce(points_instance, F(1, 2))
    assert len(result.matching) == 3
    assert sorted(f.family for f in result.matching.members) == [1, 2, 3]
    assert result.bound == 3
    assert validate_matching(result, interval_cover_oracle(points_instance))["valid"]
    for f in raw_members(points_instance, result):
        [(a, b)] = f.components
        assert a == b and a % 3 == f.family % 3


def test_pierce_two_component_members(pairs_instance):
    result = pierce(pairs_instance, F(1, 2))
    assert len(result.matching) >= 1
    assert validate_matching(result, interval_cover_oracle(pairs_instance))["valid"]
    assert all(len(verts) <= 2 for verts in result.certificate.face_vertices)


def test_pierce_separated(separated_instance):
    result = pierce(separated_instance, F(1))
    assert len(result.matching) >= 2
    assert len({f.family for f in result.matching.members}) == len(result.matching)
    assert validate_matching(result, separated_cover_oracle(separated_instance))["valid"]
    # perfect fractional matching on 4 vertices of a 2-uniform hypergraph
    assert sum(result.weights) == 2


def test_pierce_separated_three_pieces(three_piece_instance):
    check_hypothesis(three_piece_instance)
    assert three_piece_instance.solver_k == 5
    result = pierce(three_piece_instance, F(1))
    assert result.bound == 3
    assert len(result.matching) >= 3
    assert len({f.family for f in result.matching.members}) == len(result.matching)
    assert validate_matching(result, separated_cover_oracle(three_piece_instance))["valid"]
    assert result.certificate.k == 5
