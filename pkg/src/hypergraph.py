"""Exact small-scale hypergraph invariants.

Provides:
- `Hypergraph`: vertices 0..N-1, edges as frozensets, optional d-partition.
- Matching number ν (branch and bound) and a maximum matching.
- Covering number τ (subset enumeration) and a minimum cover.
- Fractional matching number ν* and perfect fractional matchings (exact LP).
- Lower bounds: ν ≥ ν*/(d-1+1/d) in rank d (ν*/(d-1) when d-partite), and
  ν* ≥ |V|/d under a perfect fractional matching.

ν and τ are exponential; both refuse inputs above `settings.HYPERGRAPH_EDGE_CAP`.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Mapping, Sequence

from src.config import settings
from src.exact_math import LinearConstraint, lp_max

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hypergraph:
    """H = (V, E) with V = {0, ..., vertices-1}; `parts`, when given, is a d-partition of V."""

    vertices: int
    edges: tuple[frozenset[int], ...]
    parts: tuple[frozenset[int], ...] | None = None

    def __post_init__(self) -> None:
        if self.vertices < 0:
            raise ValueError(f"Vertex count must be nonnegative, got {self.vertices}")
        for e in self.edges:
            if not e:
                raise ValueError("Hypergraph edges must be nonempty")
            if min(e) < 0 or max(e) >= self.vertices:
                raise ValueError(f"Edge {sorted(e)} uses a vertex outside [0, {self.vertices})")
        if self.parts is not None:
            seen: set[int] = set()
            for part in self.parts:
                if part & seen:
                    raise ValueError(f"Part {sorted(part)} overlaps an earlier part")
                seen |= part
            if seen != set(range(self.vertices)):
                raise ValueError("Parts must partition the vertex set")
            for e in self.edges:
                for part in self.parts:
                    if len(e & part) != 1:
                        raise ValueError(f"Edge {sorted(e)} meets part {sorted(part)} in {len(e & part)} vertices")

    @classmethod
    def of(
        cls,
        vertices: int,
        edges: Iterable[Iterable[int]],
        parts: Iterable[Iterable[int]] | None = None,
    ) -> Hypergraph:
        return cls(
            vertices,
            tuple(frozenset(e) for e in edges),
            tuple(frozenset(p) for p in parts) if parts is not None else None,
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Hypergraph:
        return cls.of(int(data["vertices"]), data["edges"], data.get("parts"))

    @property
    def rank(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    def incidence(self, v: int) -> List[int]:
        return [idx for idx, e in enumerate(self.edges) if v in e]


def product_hypergraph(labels: Sequence[Sequence[int]], m: int, d: int) -> Hypergraph:
    """d-partite hypergraph on [m] x [d] with one edge per piece tuple.

    Tuple (j_1, ..., j_d) (1-based) becomes the edge {t*m + j_t - 1}; part t
    holds the ids t*m .. t*m + m - 1.
    """
    edges = []
    for label in labels:
        if len(label) != d or any(not 1 <= j <= m for j in label):
            raise ValueError(f"Tuple {list(label)} is not in [{m}]^{d}")
        edges.append({t * m + j - 1 for t, j in enumerate(label)})
    parts = [range(t * m, (t + 1) * m) for t in range(d)]
    return Hypergraph.of(m * d, edges, parts)


def _check_cap(H: Hypergraph) -> None:
    cap = settings.HYPERGRAPH_EDGE_CAP
    if len(H.edges) > cap:
        raise ValueError(f"Hypergraph has {len(H.edges)} edges, above the exact-search cap of {cap}")


# --- Integral matchings and covers ---


def maximum_matching(H: Hypergraph) -> tuple[int, ...]:
    """Indices of a maximum set of pairwise disjoint edges.

    Branch and bound over edges in index order, trying inclusion first, so
    the lexicographically first optimum is returned.

    Raises:
        ValueError: Above the edge cap.
    """
    _check_cap(H)
    edges = H.edges
    m = len(edges)
    best: List[int] = []

    def search(i: int, used: frozenset[int], chosen: List[int]) -> None:
        nonlocal best
        if len(chosen) + (m - i) <= len(best):
            return
        if i == m:
            best = list(chosen)
            return
        if used.isdisjoint(edges[i]):
            chosen.append(i)
            search(i + 1, used | edges[i], chosen)
            chosen.pop()
        search(i + 1, used, chosen)

    search(0, frozenset(), [])
    return tuple(best)


def matching_number(H: Hypergraph) -> int:
    """ν(H)."""
    return len(maximum_matching(H))


def minimum_cover(H: Hypergraph) -> tuple[int, ...]:
    """Smallest vertex set meeting every edge; lexicographically first among optima.

    Only vertices that appear in some edge are considered.
    """
    _check_cap(H)
    universe = sorted(set().union(*H.edges)) if H.edges else []
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            chosen = set(combo)
            if all(not chosen.isdisjoint(e) for e in H.edges):
                return combo
    raise AssertionError("the full edge union always covers")


def covering_number(H: Hypergraph) -> int:
    """τ(H)."""
    return len(minimum_cover(H))


# --- Fractional matchings ---


def _vertex_rows(H: Hypergraph, vertices: Sequence[int]) -> List[tuple[Fraction, ...]]:
    return [tuple(Fraction(1) if v in e else Fraction(0) for e in H.edges) for v in vertices]


def fractional_matching(H: Hypergraph) -> tuple[Fraction, tuple[Fraction, ...]]:
    """ν*(H) with an optimal weight vector, one entry per edge."""
    if not H.edges:
        return Fraction(0), ()
    touched = sorted(set().union(*H.edges))
    constraints = [LinearConstraint(row, "<=", Fraction(1)) for row in _vertex_rows(H, touched)]
    result = lp_max([1] * len(H.edges), constraints)
    if not result.feasible or result.solution is None or result.value is None:
        raise AssertionError(f"fractional matching LP returned {result.status}")
    return result.value, result.solution


def fractional_matching_number(H: Hypergraph) -> Fraction:
    """ν*(H)."""
    return fractional_matching(H)[0]


def perfect_fractional_matching(H: Hypergraph) -> tuple[Fraction, ...] | None:
    """Weights f ≥ 0 with Σ_{e∋v} f(e) = 1 at every vertex, or None."""
    if H.vertices == 0:
        return ()
    if not H.edges:
        return None
    constraints = [LinearConstraint(row, "==", Fraction(1)) for row in _vertex_rows(H, range(H.vertices))]
    result = lp_max([0] * len(H.edges), constraints)
    if not result.feasible or result.solution is None:
        return None
    return result.solution


def has_perfect_fractional_matching(H: Hypergraph) -> bool:
    return perfect_fractional_matching(H) is not None


def is_perfect_fractional_matching(H: Hypergraph, weights: Sequence[Fraction]) -> bool:
    """Checks given weights directly: nonnegative and summing to 1 at every vertex."""
    if len(weights) != len(H.edges) or any(w < 0 for w in weights):
        return False
    return all(sum((weights[idx] for idx in H.incidence(v)), Fraction(0)) == 1 for v in range(H.vertices))


# --- Bounds ---


def furedi_matching_bound(H: Hypergraph, d: int) -> Fraction:
    """Lower bound on ν(H) from ν*(H) for rank ≤ d.

    Returns ν*/(d-1) when H carries a d-partition, ν*/(d-1+1/d) otherwise,
    and ν* itself for d = 1.

    Raises:
        ValueError: If d < 1 or some edge has more than d vertices.
    """
    if d < 1:
        raise ValueError(f"Rank bound d must be positive, got {d}")
    if H.rank > d:
        raise ValueError(f"Hypergraph has rank {H.rank}, above d={d}")
    nu_star = fractional_matching_number(H)
    if d == 1:
        return nu_star
    if H.parts is not None and len(H.parts) == d:
        return nu_star / (d - 1)
    return nu_star / (d - 1 + Fraction(1, d))


def rank_lower_bound_nustar(H: Hypergraph, d: int) -> Fraction:
    """|V|/d, a lower bound on ν*(H) when H has rank ≤ d and a perfect fractional matching.

    Raises:
        ValueError: If H has no perfect fractional matching or its rank exceeds d.
    """
    if d < 1 or H.rank > d:
        raise ValueError(f"Hypergraph rank {H.rank} is incompatible with d={d}")
    if not has_perfect_fractional_matching(H):
        raise ValueError("Hypergraph has no perfect fractional matching")
    return Fraction(H.vertices, d)
