"""Convex triangulations of a polytope and the edge-subdivision primitive.

Handles:
- `Triangulation`, an immutable pure simplicial complex over exact points.
- `initial_triangulation`: one simplex, the staircase triangulation of a
  product of simplices, or a validated user-supplied triangulation.
- `subdivide_edge`: the operation X(v1, v2) that inserts the midpoint of an
  edge and splits every maximal simplex containing it in two.
- `refine_to_diameter`: longest-edge bisection until every edge is ≤ eps.
- Bad-edge bookkeeping and a JSON dump/load pair.

Operations return new `Triangulation` objects. Internally, multi-step
algorithms work on a mutable `_Complex` and freeze it once at the end.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Sequence

from src.config import settings
from src.errors import IterationCapExceeded
from src.exact_math import (
    LinearConstraint,
    RatLike,
    RatPoint,
    affine_rank,
    as_rat,
    centroid,
    lp_max,
    midpoint,
    projection_axes,
    rat_pair,
    simplex_volume,
    squared_distance,
)
from src.polytope import WHOLE_POLYTOPE, PolytopeModel

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class VertexMeta:
    """Cached support face and creation tag of a triangulation vertex.

    `parents` is None for original vertices and (a, b) for a vertex created
    as the midpoint of a and b.
    """

    support: int
    parents: tuple[int, int] | None = None

    @property
    def is_original(self) -> bool:
        return self.parents is None


# --- Mutable working copy ---


class _Complex:
    """Mutable complex with vertex adjacency and edge stars kept in sync."""

    def __init__(
        self,
        polytope: PolytopeModel,
        points: Iterable[RatPoint],
        meta: Iterable[VertexMeta],
        maximal: Iterable[Sequence[int]],
    ) -> None:
        self.polytope = polytope
        self.points: List[RatPoint] = list(points)
        self.meta: List[VertexMeta] = list(meta)
        self.simplices: Dict[int, tuple[int, ...]] = {}
        self.edge_star: Dict[Edge, set[int]] = {}
        self.vertex_star: Dict[int, set[int]] = {v: set() for v in range(len(self.points))}
        self.adjacent: Dict[int, set[int]] = {v: set() for v in range(len(self.points))}
        self._next_sid = 0
        for simplex in maximal:
            self._add(tuple(sorted(simplex)))

    def _add(self, simplex: tuple[int, ...]) -> None:
        sid = self._next_sid
        self._next_sid += 1
        self.simplices[sid] = simplex
        for v in simplex:
            self.vertex_star[v].add(sid)
        for a, b in itertools.combinations(simplex, 2):
            self.edge_star.setdefault((a, b), set()).add(sid)
            self.adjacent[a].add(b)
            self.adjacent[b].add(a)

    def _remove(self, sid: int) -> None:
        simplex = self.simplices.pop(sid)
        for v in simplex:
            self.vertex_star[v].discard(sid)
        for a, b in itertools.combinations(simplex, 2):
            star = self.edge_star[(a, b)]
            star.discard(sid)
            if not star:
                del self.edge_star[(a, b)]
                self.adjacent[a].discard(b)
                self.adjacent[b].discard(a)

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edge_star

    def star(self, v: int) -> list[tuple[int, ...]]:
        """Maximal simplices containing vertex v."""
        return [self.simplices[sid] for sid in sorted(self.vertex_star[v])]

    def subdivide(self, a: int, b: int) -> int:
        """Applies X(a, b) in place and returns the id of the new midpoint vertex."""
        key = edge_key(a, b)
        star = self.edge_star.get(key)
        if not star:
            raise ValueError(f"({a}, {b}) is not an edge of the triangulation")
        point = midpoint(self.points[a], self.points[b])
        new = len(self.points)
        self.points.append(point)
        self.meta.append(VertexMeta(self.polytope.support(point), (a, b)))
        self.adjacent[new] = set()
        self.vertex_star[new] = set()
        for sid in sorted(star):
            old = self.simplices[sid]
            self._remove(sid)
            rest = [v for v in old if v != a and v != b]
            # conv{b(a,b), b, rest} replaces a; conv{b(a,b), a, rest} replaces b
            self._add(tuple(sorted([new, b, *rest])))
            self._add(tuple(sorted([new, a, *rest])))
        return new

    def freeze(self) -> Triangulation:
        return Triangulation(self.polytope, self.points, self.meta, list(self.simplices.values()))


# --- Immutable triangulation ---


class Triangulation:
    """Pure (k-1)-dimensional simplicial complex triangulating a polytope.

    Vertices are indexed 0..V-1; each maximal simplex is a sorted tuple of
    k vertex ids. The list order of `maximal` is the insertion order used by
    the panchromatic search.
    """

    def __init__(
        self,
        polytope: PolytopeModel,
        points: Sequence[RatPoint],
        meta: Sequence[VertexMeta],
        maximal: Sequence[Sequence[int]],
    ) -> None:
        if len(points) != len(meta):
            raise ValueError("Every vertex needs exactly one metadata record")
        self._polytope = polytope
        self._points = tuple(points)
        self._meta = tuple(meta)
        self._maximal = tuple(tuple(sorted(s)) for s in maximal)

    @classmethod
    def from_simplices(
        cls,
        polytope: PolytopeModel,
        points: Sequence[RatPoint],
        simplices: Sequence[Sequence[int]],
        *,
        validate: bool = True,
    ) -> Triangulation:
        """Builds a triangulation from explicit vertex coordinates and maximal simplices.

        Raises:
            ValueError: If validation fails (purity, degeneracy, vertex outside P,
                overlapping interiors, or an unmatched interior facet).
        """
        meta = [VertexMeta(polytope.support(pt)) for pt in points]
        tri = cls(polytope, points, meta, simplices)
        if validate:
            validate_triangulation(tri)
        return tri

    # --- Accessors ---

    @property
    def polytope(self) -> PolytopeModel:
        return self._polytope

    @property
    def points(self) -> tuple[RatPoint, ...]:
        return self._points

    @property
    def meta(self) -> tuple[VertexMeta, ...]:
        return self._meta

    @property
    def maximal(self) -> tuple[tuple[int, ...], ...]:
        return self._maximal

    @property
    def vertex_count(self) -> int:
        return len(self._points)

    @property
    def k(self) -> int:
        return self._polytope.k

    def point(self, v: int) -> RatPoint:
        return self._points[v]

    def support_of(self, v: int) -> int:
        return self._meta[v].support

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return frozenset(e for s in self._maximal for e in itertools.combinations(s, 2))

    @cached_property
    def _adjacency(self) -> Dict[int, frozenset[int]]:
        adj: Dict[int, set[int]] = {v: set() for v in range(len(self._points))}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adjacency[v]

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edges

    def simplices_containing(self, *vertex_ids: int) -> list[tuple[int, ...]]:
        wanted = set(vertex_ids)
        return [s for s in self._maximal if wanted.issubset(s)]

    def generators(self, v: int) -> list[int]:
        """Creation chain of v: [v] for originals, generators(a) + [b] for b(a, b)."""
        parents = self._meta[v].parents
        if parents is None:
            return [v]
        return self.generators(parents[0]) + [parents[1]]

    def max_edge_sq(self) -> Fraction:
        if not self.edges:
            return Fraction(0)
        return max(squared_distance(self._points[a], self._points[b]) for a, b in self.edges)

    def total_volume(self) -> Fraction:
        """Sum of simplex volumes projected onto coordinates spanning aff(P)."""
        axes = projection_axes(list(self._polytope.vertices))
        return sum(
            (simplex_volume([self._points[v] for v in s], axes) for s in self._maximal),
            Fraction(0),
        )

    def _thaw(self) -> _Complex:
        return _Complex(self._polytope, self._points, self._meta, self._maximal)

    # --- Serialization ---

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vertices": [pt.to_pairs() for pt in self._points],
            "parents": [list(m.parents) if m.parents is not None else None for m in self._meta],
            "simplices": [list(s) for s in self._maximal],
        }

    @classmethod
    def from_dict(cls, polytope: PolytopeModel, data: Mapping[str, Any]) -> Triangulation:
        points = [RatPoint(tuple(as_rat(c) for c in coords)) for coords in data["vertices"]]
        parents = data.get("parents") or [None] * len(points)
        meta = [
            VertexMeta(polytope.support(pt), (int(par[0]), int(par[1])) if par is not None else None)
            for pt, par in zip(points, parents)
        ]
        return cls(polytope, points, meta, data["simplices"])

    def __repr__(self) -> str:
        return f"Triangulation(vertices={len(self._points)}, simplices={len(self._maximal)})"


# --- Validation ---


def _interiors_meet(first: Sequence[RatPoint], second: Sequence[RatPoint]) -> bool:
    """True when the relative interiors of two full-dimensional simplices intersect.

    Maximizes t subject to both points being convex combinations with every
    coefficient ≥ t and the two points coinciding; interiors meet iff t* > 0.
    """
    a, b = len(first), len(second)
    width = a + b + 1
    constraints = [
        LinearConstraint.of([1] * a + [0] * b + [0], "==", 1),
        LinearConstraint.of([0] * a + [1] * b + [0], "==", 1),
    ]
    for axis in range(first[0].dim):
        row = [pt[axis] for pt in first] + [-pt[axis] for pt in second] + [Fraction(0)]
        constraints.append(LinearConstraint(tuple(row), "==", Fraction(0)))
    for i in range(a + b):
        row = [Fraction(0)] * width
        row[i] = Fraction(1)
        row[-1] = Fraction(-1)
        constraints.append(LinearConstraint(tuple(row), ">=", Fraction(0)))
    result = lp_max([0] * (width - 1) + [1], constraints)
    return result.feasible and result.value is not None and result.value > 0


def validate_triangulation(tri: Triangulation, *, pairwise_limit: int = 60) -> None:
    """Checks purity, non-degeneracy, vertices in P, facet matching and disjoint interiors.

    The pairwise interior test runs only when the complex has at most
    `pairwise_limit` maximal simplices.

    Raises:
        ValueError: Naming the offending simplex.
    """
    polytope = tri.polytope
    k = polytope.k
    for v, pt in enumerate(tri.points):
        if not polytope.contains(pt):
            raise ValueError(f"Vertex {v} at {pt!r} lies outside the polytope")
    for s in tri.maximal:
        if len(set(s)) != k:
            raise ValueError(f"Simplex {list(s)} has {len(set(s))} vertices, expected {k}")
        if affine_rank([tri.point(v) for v in s]) != polytope.dim:
            raise ValueError(f"Simplex {list(s)} is degenerate")

    facet_count: Dict[tuple[int, ...], int] = {}
    for s in tri.maximal:
        for facet in itertools.combinations(s, k - 1):
            facet_count[facet] = facet_count.get(facet, 0) + 1
    for facet, count in facet_count.items():
        if count > 2:
            raise ValueError(f"Facet {list(facet)} is shared by {count} simplices")
        if count == 1:
            center = centroid([tri.point(v) for v in facet])
            if polytope.support(center) == WHOLE_POLYTOPE:
                owner = next(s for s in tri.maximal if set(facet).issubset(s))
                raise ValueError(f"Simplex {list(owner)} has an interior facet {list(facet)} with no neighbour")

    if len(tri.maximal) <= pairwise_limit:
        for s, t in itertools.combinations(tri.maximal, 2):
            if _interiors_meet([tri.point(v) for v in s], [tri.point(v) for v in t]):
                raise ValueError(f"Simplices {list(s)} and {list(t)} overlap")


# --- Construction ---


def _shuffles(counts: List[int]) -> Iterable[tuple[int, ...]]:
    """Distinct orderings of a multiset of factor indices, lexicographically."""
    if not any(counts):
        yield ()
        return
    for t, c in enumerate(counts):
        if c:
            counts[t] -= 1
            for rest in _shuffles(counts):
                yield (t, *rest)
            counts[t] += 1


def staircase_simplices(sizes: Sequence[int]) -> list[tuple[int, ...]]:
    """Maximal cells of the staircase triangulation of Δ^{m_1-1} × ... × Δ^{m_d-1}.

    One cell per monotone lattice path from (0, ..., 0) to (m_1-1, ..., m_d-1).
    """
    cells = []
    for steps in _shuffles([m - 1 for m in sizes]):
        label = [0] * len(sizes)
        path = [label.copy()]
        for t in steps:
            label[t] += 1
            path.append(label.copy())
        ids = []
        for lab in path:
            idx = 0
            for j, size in zip(lab, sizes):
                idx = idx * size + j
            ids.append(idx)
        cells.append(tuple(sorted(ids)))
    return cells


def initial_triangulation(P: PolytopeModel) -> Triangulation:
    """Starting triangulation: the simplex itself, the staircase, or the supplied one."""
    points = list(P.vertices)
    meta = [VertexMeta(P.support(pt)) for pt in points]
    if P.kind == "simplex":
        return Triangulation(P, points, meta, [tuple(range(len(points)))])
    if P.kind == "product":
        assert P.factor_sizes is not None
        return Triangulation(P, points, meta, staircase_simplices(P.factor_sizes))
    if P.triangulation_hint is None:
        raise ValueError("A general polytope must carry an initial triangulation")
    tri = Triangulation(P, points, meta, P.triangulation_hint)
    validate_triangulation(tri)
    return tri


def subdivide_edge(T: Triangulation, v1: int, v2: int) -> Triangulation:
    """Returns X(v1, v2): T with the midpoint of v1v2 inserted."""
    cx = T._thaw()
    cx.subdivide(v1, v2)
    return cx.freeze()


def refine_in_place(cx: _Complex, eps: Fraction) -> int:
    """Longest-edge bisection on a working complex; returns the number of subdivisions."""
    limit = eps * eps
    heap = [(-squared_distance(cx.points[a], cx.points[b]), a, b) for a, b in cx.edge_star]
    heapq.heapify(heap)
    count = 0
    while heap and -heap[0][0] > limit:
        _, a, b = heapq.heappop(heap)
        if not cx.has_edge(a, b):
            continue
        count += 1
        if count > settings.REFINE_ITERATION_CAP:
            raise IterationCapExceeded(f"refine_to_diameter exceeded {settings.REFINE_ITERATION_CAP} subdivisions")
        new = cx.subdivide(a, b)
        for u in cx.adjacent[new]:
            x, y = edge_key(new, u)
            heapq.heappush(heap, (-squared_distance(cx.points[x], cx.points[y]), x, y))
    return count


def refine_to_diameter(T: Triangulation, eps: RatLike) -> Triangulation:
    """Bisects a longest edge (ties: lex smallest pair) until every edge is ≤ eps.

    Args:
        T (Triangulation): Starting triangulation.
        eps (RatLike): Positive rational diameter bound.

    Returns:
        Triangulation: T itself when already fine enough, else a refinement.
    """
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if T.max_edge_sq() <= eps * eps:
        return T
    cx = T._thaw()
    count = refine_in_place(cx, eps)
    refined = cx.freeze()
    logger.info(
        "Refined to diameter %s with %d subdivisions: %d vertices, %d simplices",
        eps,
        count,
        refined.vertex_count,
        len(refined.maximal),
    )
    return refined


# --- Bad edges ---


def bad_edges(T: Triangulation, f: Mapping[int, int] | Sequence[int]) -> frozenset[Edge]:
    """Edges whose endpoints carry the same colour."""
    return frozenset((a, b) for a, b in T.edges if f[a] == f[b])


def bad_neighbors(T: Triangulation, f: Mapping[int, int] | Sequence[int], v: int) -> frozenset[int]:
    """B(T; v): neighbours of v sharing its colour."""
    return frozenset(u for u in T.neighbors(v) if f[u] == f[v])


def triangulation_json(T: Triangulation) -> Dict[str, Any]:
    """JSON-ready dump with a size summary."""
    payload = T.to_dict()
    payload["summary"] = {
        "vertices": T.vertex_count,
        "simplices": len(T.maximal),
        "max_edge_sq": rat_pair(T.max_edge_sq()),
    }
    return payload
