# tests/test_hypergraph.py

import itertools
from fractions import Fraction

import numpy as np
import pytest

from src.config import settings
from src.hypergraph import (
    Hypergraph,
    covering_number,
    fractional_matching,
    fractional_matching_number,
    furedi_matching_bound,
    has_perfect_fractional_matching,
    is_perfect_fractional_matching,
    matching_number,
    maximum_matching,
    minimum_cover,
    perfect_fractional_matching,
    product_hypergraph,
    rank_lower_bound_nustar,
)

F = Fraction

# --- Fixtures ---


@pytest.fixture
def fano():
    """Fano plane: 7 points, 7 lines, any two lines meet."""
    lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
    return Hypergraph.of(7, lines)


@pytest.fixture
def triangle_graph():
    return Hypergraph.of(3, [[0, 1], [1, 2], [0, 2]])


def _brute_nu(H):
    for size in range(len(H.edges), 0, -1):
        for combo in itertools.combinations(H.edges, size):
            if all(a.isdisjoint(b) for a, b in itertools.combinations(combo, 2)):
                return size
    return 0


def _brute_tau(H):
    for size in range(H.vertices + 1):
        for combo in itertools.combinations(range(H.vertices), size):
            if all(e & set(combo) for e in H.edges):
                return size
    raise AssertionError("unreachable")


# --- Construction ---


def test_hypergraph_validation():
    with pytest.raises(ValueError, match="nonempty"):
        Hypergraph.of(2, [[]])
    with pytest.raises(ValueError, match="outside"):
        Hypergraph.of(2, [[0, 2]])
    with pytest.raises(ValueError, match="partition"):
        Hypergraph.of(3, [[0, 1]], parts=[[0], [1]])
    with pytest.raises(ValueError, match="meets part"):
        Hypergraph.of(4, [[0, 1]], parts=[[0, 1], [2, 3]])


def test_from_dict_and_rank():
    H = Hypergraph.from_dict({"vertices": 4, "edges": [[0, 1, 2], [3]]})
    assert H.rank == 3
    assert H.incidence(3) == [1]
    assert H.parts is None


def test_product_hypergraph_layout():
    H = product_hypergraph([(1, 1), (2, 2), (1, 2)], m=2, d=2)
    assert H.edges == (frozenset({0, 2}), frozenset({1, 3}), frozenset({0, 3}))
    assert H.parts == (frozenset({0, 1}), frozenset({2, 3}))
    with pytest.raises(ValueError, match="is not in"):
        product_hypergraph([(3, 1)], m=2, d=2)


# --- Integral invariants ---


def test_fano_invariants(fano):
    assert matching_number(fano) == 1
    assert covering_number(fano) == 3
    assert fractional_matching_number(fano) == F(7, 3)
    weights = perfect_fractional_matching(fano)
    assert weights is not None
    assert is_perfect_fractional_matching(fano, weights)
    # Rank 3 without a partition: ν ≥ ν*/(2 + 1/3) = 1 is tight here
    assert furedi_matching_bound(fano, 3) == 1
    assert rank_lower_bound_nustar(fano, 3) == F(7, 3)


def test_triangle_graph_invariants(triangle_graph):
    assert matching_number(triangle_graph) == 1
    assert covering_number(triangle_graph) == 2
    value, weights = fractional_matching(triangle_graph)
    assert value == F(3, 2)
    assert weights == (F(1, 2), F(1, 2), F(1, 2))


def test_maximum_matching_is_lexicographically_first():
    H = Hypergraph.of(4, [[0, 1], [1, 2], [2, 3]])
    assert maximum_matching(H) == (0, 2)
    assert minimum_cover(H) == (0, 2)


def test_empty_hypergraph():
    H = Hypergraph.of(0, [])
    assert matching_number(H) == 0
    assert covering_number(H) == 0
    assert fractional_matching_number(H) == 0
    assert perfect_fractional_matching(H) == ()
    assert perfect_fractional_matching(Hypergraph.of(2, [])) is None


def test_no_perfect_fractional_matching():
    # vertex 2 lies in no edge
    H = Hypergraph.of(3, [[0, 1]])
    assert not has_perfect_fractional_matching(H)
    assert not is_perfect_fractional_matching(H, [F(1)])
    with pytest.raises(ValueError, match="no perfect fractional matching"):
        rank_lower_bound_nustar(H, 2)


def test_partite_bound_uses_d_minus_one():
    H = product_hypergraph([(1, 1), (1, 2), (2, 1), (2, 2)], m=2, d=2)
    assert fractional_matching_number(H) == 2
    assert furedi_matching_bound(H, 2) == 2
    with pytest.raises(ValueError, match="above d"):
        furedi_matching_bound(H, 1)


def test_edge_cap(monkeypatch, fano):
    monkeypatch.setattr(settings, "HYPERGRAPH_EDGE_CAP", 5)
    with pytest.raises(ValueError, match="cap"):
        matching_number(fano)
    with pytest.raises(ValueError, match="cap"):
        covering_number(fano)


@pytest.mark.parametrize("seed", range(25))
def test_exact_invariants_against_brute_force(seed):
    """Random rank-≤3 hypergraphs: ν ≤ ν* ≤ τ and ν, τ agree with enumeration."""
    rng = np.random.default_rng(seed)
    vertices = int(rng.integers(3, 7))
    edges = []
    for _ in range(int(rng.integers(1, 8))):
        size = int(rng.integers(1, 4))
        edges.append([int(v) for v in rng.choice(vertices, size=min(size, vertices), replace=False)])
    H = Hypergraph.of(vertices, edges)

    nu, tau = matching_number(H), covering_number(H)
    assert nu == _brute_nu(H)
    assert tau == _brute_tau(H)
    assert nu <= fractional_matching_number(H) <= tau
    assert furedi_matching_bound(H, 3) <= nu
    chosen = [H.edges[i] for i in maximum_matching(H)]
    assert all(a.isdisjoint(b) for a, b in itertools.combinations(chosen, 2))


# --- Fractional bounds on random instances ---


@pytest.mark.parametrize("seed", range(15))
def test_fractional_matching_against_vertex_enumeration(seed, vertex_enumeration_max):
    rng = np.random.default_rng(100 + seed)
    vertices = int(rng.integers(3, 6))
    edges = [
        [int(v) for v in rng.choice(vertices, size=int(rng.integers(1, 4)), replace=False)]
        for _ in range(int(rng.integers(1, 7)))
    ]
    H = Hypergraph.of(vertices, edges)
    rows = [[1 if v in e else 0 for e in H.edges] for v in range(vertices)]

    value, weights = fractional_matching(H)
    assert value == vertex_enumeration_max([1] * len(H.edges), rows, [1] * vertices)
    assert sum(weights) == value
    assert all(w >= 0 for w in weights)
    assert all(sum(w for w, e in zip(weights, H.edges) if v in e) <= 1 for v in range(vertices))


@pytest.mark.parametrize("seed", range(10))
def test_rank_lower_bound_on_random_perfect_instances(seed):
    """A partition of V into blocks of size ≤ d is a perfect matching, so ν* ≥ |V|/d."""
    rng = np.random.default_rng(200 + seed)
    d = int(rng.integers(2, 4))
    vertices = int(rng.integers(d, 8))
    order = [int(v) for v in rng.permutation(vertices)]
    blocks = [order[i : i + d] for i in range(0, vertices, d)]
    extra = [
        [int(v) for v in rng.choice(vertices, size=int(rng.integers(1, d + 1)), replace=False)]
        for _ in range(int(rng.integers(0, 4)))
    ]
    H = Hypergraph.of(vertices, blocks + extra)

    assert has_perfect_fractional_matching(H)
    bound = rank_lower_bound_nustar(H, d)
    assert bound == F(vertices, d)
    assert fractional_matching_number(H) >= bound


@pytest.mark.parametrize("seed", range(10))
def test_partite_furedi_bound_on_random_product_hypergraphs(seed):
    rng = np.random.default_rng(300 + seed)
    m, d = 3, int(rng.integers(2, 4))
    labels = {tuple(int(j) for j in rng.integers(1, m + 1, size=d)) for _ in range(int(rng.integers(2, 8)))}
    H = product_hypergraph(sorted(labels), m, d)

    nu = matching_number(H)
    nu_star = fractional_matching_number(H)
    assert furedi_matching_bound(H, d) == nu_star / (d - 1)
    assert nu_star / (d - 1) <= nu <= nu_star
    if d == 2:
        # bipartite: the matching polytope is integral
        assert nu == nu_star
