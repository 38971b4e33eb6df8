"""Good labelings by bad-edge elimination.

Handles:
- `choose_label`: the smallest admissible (colour, face) pair at a point.
- `initial_labeling`: labels every vertex of a triangulation.
- `eliminate_bad_edge`: the queue-driven subdivision algorithm that removes
  one bad edge without creating new ones.
- `make_good`: eliminates bad edges (lexicographically smallest first) until
  every maximal simplex is rainbow.

Vertex choice in the queues is by smallest vertex id, colours are tried in
increasing order and faces in the polytope's fixed face order, so runs are
deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence

from src import diagnostics
from src.config import settings
from src.cover import CoverOracle, ViolationCertificate
from src.errors import CoverViolation, InternalError, IterationCapExceeded
from src.exact_math import RatPoint
from src.polytope import AnchorTable, PolytopeModel
from src.triangulation import Edge, Triangulation, _Complex, bad_edges, edge_key

logger = logging.getLogger(__name__)

TraceSink = List[Dict[str, Any]]


@dataclass(frozen=True)
class Labeling:
    """The maps λ (faces), f (colours) and y (anchor points) on triangulation vertices."""

    faces: Mapping[int, int]
    colors: Mapping[int, int]
    anchors: Mapping[int, RatPoint]

    def face(self, v: int) -> int:
        return self.faces[v]

    def color(self, v: int) -> int:
        return self.colors[v]

    def anchor(self, v: int) -> RatPoint:
        return self.anchors[v]


def choose_label(
    v: RatPoint,
    allowed: Iterable[int],
    O: CoverOracle,
    P: PolytopeModel,
    *,
    support: int | None = None,
) -> tuple[int, int]:
    """Smallest allowed colour i, then smallest face τ ⊆ supp(v), with v ∈ A^i_τ.

    Args:
        v (RatPoint): Point to label.
        allowed (Iterable[int]): Admissible colours; needs at least n-k+1 of them.
        O (CoverOracle): Membership oracle.
        P (PolytopeModel): The polytope.
        support (int | None): Cached supp(v), if known.

    Returns:
        tuple[int, int]: (colour, face id).

    Raises:
        ValueError: If fewer than n-k+1 colours are allowed or a colour is out of range.
        CoverViolation: If no allowed colour covers v.
    """
    colors = sorted(set(allowed))
    need = O.n - P.k + 1
    if len(colors) < need:
        raise ValueError(f"choose_label needs at least {need} allowed colours, got {colors}")
    if colors and not (1 <= colors[0] and colors[-1] <= O.n):
        raise ValueError(f"Allowed colours {colors} fall outside [1, {O.n}]")
    supp = P.support(v) if support is None else support
    faces = P.faces_within(supp)
    for i in colors:
        for tau in faces:
            if O.query(i, tau, v):
                return i, tau
    raise CoverViolation(ViolationCertificate(v, tuple(colors[:need]), supp))


class _Eliminator:
    """Working state shared by the elimination rounds of one run.

    Keeps the labeling dictionaries and the global bad-edge set in step with
    the mutable complex so that each round touches only the star of the new
    vertices.
    """

    def __init__(
        self,
        cx: _Complex,
        O: CoverOracle,
        P: PolytopeModel,
        anchors: AnchorTable,
        trace: TraceSink | None,
        labeling: Labeling | None = None,
    ) -> None:
        self.cx = cx
        self.O = O
        self.P = P
        self.anchors = anchors
        self.trace = trace
        self.check = settings.CHECK_INVARIANTS
        self.faces: Dict[int, int] = dict(labeling.faces) if labeling else {}
        self.colors: Dict[int, int] = dict(labeling.colors) if labeling else {}
        self.points: Dict[int, RatPoint] = dict(labeling.anchors) if labeling else {}
        self.bad: set[Edge] = set()
        if labeling is not None:
            self._rebuild_bad()

    def _rebuild_bad(self) -> None:
        self.bad = {e for e in self.cx.edge_star if self.colors[e[0]] == self.colors[e[1]]}

    def label_all(self) -> None:
        every = range(1, self.O.n + 1)
        for v in range(len(self.cx.points)):
            i, tau = choose_label(self.cx.points[v], every, self.O, self.P, support=self.cx.meta[v].support)
            self._assign(v, i, tau)
        self._rebuild_bad()

    def _assign(self, v: int, color: int, face_id: int) -> None:
        self.colors[v] = color
        self.faces[v] = face_id
        self.points[v] = self.anchors.get(color, face_id)

    def _label_new(self, v: int, allowed: Iterable[int]) -> tuple[int, int]:
        i, tau = choose_label(self.cx.points[v], allowed, self.O, self.P, support=self.cx.meta[v].support)
        self._assign(v, i, tau)
        for u in self.cx.adjacent[v]:
            if self.colors[u] == i:
                self.bad.add(edge_key(u, v))
        return i, tau

    def _split(self, a: int, b: int) -> int:
        new = self.cx.subdivide(a, b)
        self.bad.discard(edge_key(a, b))
        return new

    def _bad_neighbors(self, v: int) -> set[int]:
        color = self.colors[v]
        return {u for u in self.cx.adjacent[v] if self.colors[u] == color}

    def _record(self, iteration: int, j: int, base: int, vertex: int, new: int) -> None:
        if self.trace is None:
            return
        self.trace.append(
            {
                "iteration": iteration,
                "j": j,
                "base": base,
                "vertex": vertex,
                "new_vertex": new,
                "coords": self.cx.points[new].to_pairs(),
                "color": self.colors[new],
                "face": list(self.P.face_vertices(self.faces[new])),
            }
        )

    def eliminate(self, v1: int, v2: int) -> None:
        """Removes the bad edge v1v2 from the working complex in place."""
        k = self.P.k
        all_colors = set(range(1, self.O.n + 1))
        if self.colors[v1] != self.colors[v2]:
            raise ValueError(f"Edge ({v1}, {v2}) is not bad")
        if not self.cx.has_edge(v1, v2):
            raise ValueError(f"({v1}, {v2}) is not an edge of the triangulation")
        original_bad = set(self.bad) if self.check else set()

        # stack[i] is v_{i+1}; chain[j] is the vertex b(v_1, ..., v_j).
        stack: List[int] = [v1, v2]
        chain: Dict[int, int] = {1: v1}
        new = self._split(v1, v2)
        chain[2] = new
        self._label_new(new, all_colors - {self.colors[v2]})
        self._record(0, 0, v1, v2, new)
        queues: Dict[int, set[int]] = {1: self._bad_neighbors(new)}
        diagnostics.check_queue_bound(queues, k)

        iteration = 0
        while True:
            live = [j for j, q in queues.items() if q]
            if not live:
                break
            iteration += 1
            if iteration > settings.ELIMINATION_ITERATION_CAP:
                raise IterationCapExceeded(
                    f"Elimination of ({v1}, {v2}) exceeded {settings.ELIMINATION_ITERATION_CAP} iterations"
                )
            j = max(live)
            v = min(queues[j])
            queues[j].discard(v)
            del stack[j + 1 :]
            stack.append(v)
            for stale in [key for key in chain if key > j + 1]:
                del chain[stale]

            base = chain[j + 1]
            if not self.cx.has_edge(base, v):
                raise InternalError(f"Queued edge ({base}, {v}) vanished before it was subdivided")
            new = self._split(base, v)
            chain[j + 2] = new
            used = {self.colors[u] for u in stack[1:]}
            color, _ = self._label_new(new, all_colors - used)
            if color in used:
                raise InternalError(f"Vertex {new} reused colour {color} from its generators")

            queues[j + 1] = self._bad_neighbors(new)
            for stale in [key for key in queues if key > j + 1]:
                del queues[stale]
            self._record(iteration, j, base, v, new)
            diagnostics.check_queue_bound(queues, k)
            if self.check:
                diagnostics.check_star_shape(self.cx.star, stack, chain)
                diagnostics.check_new_bad_edges(self.bad, original_bad, queues, chain)

        logger.debug("Eliminated bad edge (%d, %d) after %d iterations", v1, v2, iteration)
        if self.check:
            leftover = self.bad - (original_bad - {edge_key(v1, v2)})
            if leftover:
                raise InternalError(f"Elimination of ({v1}, {v2}) left new bad edges {sorted(leftover)}")

    def labeling(self) -> Labeling:
        return Labeling(dict(self.faces), dict(self.colors), dict(self.points))


def initial_labeling(T: Triangulation, O: CoverOracle, P: PolytopeModel, anchors: AnchorTable) -> Labeling:
    """Labels every vertex with choose_label(v, [n]); y(v) = anchors[f(v)][λ(v)]."""
    faces: Dict[int, int] = {}
    colors: Dict[int, int] = {}
    points: Dict[int, RatPoint] = {}
    every = range(1, O.n + 1)
    for v in range(T.vertex_count):
        i, tau = choose_label(T.point(v), every, O, P, support=T.support_of(v))
        faces[v], colors[v] = tau, i
        points[v] = anchors.get(i, tau)
    return Labeling(faces, colors, points)


def eliminate_bad_edge(
    T: Triangulation,
    L: Labeling,
    e: Sequence[int],
    O: CoverOracle,
    P: PolytopeModel,
    anchors: AnchorTable,
    trace: TraceSink | None = None,
) -> tuple[Triangulation, Labeling]:
    """Removes the bad edge e = (v1, v2) without creating new bad edges.

    Returns:
        tuple[Triangulation, Labeling]: T' and its labeling, with
        B(T') ⊆ B(T) minus v1v2 and v1v2 no longer an edge.

    Raises:
        ValueError: If e is not a bad edge of T.
        CoverViolation: If a new vertex cannot be labeled.
    """
    v1, v2 = e
    before = bad_edges(T, L.colors)
    if edge_key(v1, v2) not in before:
        raise ValueError(f"({v1}, {v2}) is not a bad edge")
    elim = _Eliminator(T._thaw(), O, P, anchors, trace, labeling=L)
    elim.eliminate(v1, v2)
    if not elim.bad <= (before - {edge_key(v1, v2)}):
        raise InternalError(f"Bad edges grew while eliminating ({v1}, {v2})")
    if elim.cx.has_edge(v1, v2):
        raise InternalError(f"Edge ({v1}, {v2}) survived its elimination")
    return elim.cx.freeze(), elim.labeling()


def make_good(
    T: Triangulation,
    O: CoverOracle,
    P: PolytopeModel,
    anchors: AnchorTable,
    trace: TraceSink | None = None,
) -> tuple[Triangulation, Labeling]:
    """Labels T and eliminates bad edges until every maximal simplex is rainbow.

    Args:
        T (Triangulation): Triangulation of P.
        O (CoverOracle): Cover providing the labels.
        P (PolytopeModel): The polytope.
        anchors (AnchorTable): Anchor points y^i_τ.
        trace (TraceSink | None): Optional list receiving one record per iteration.

    Returns:
        tuple[Triangulation, Labeling]: Refinement T' and a good labeling of it.
    """
    elim = _Eliminator(T._thaw(), O, P, anchors, trace)
    elim.label_all()
    total = len(elim.bad)
    logger.info("Initial labeling: %d vertices, %d bad edges", len(elim.cx.points), total)
    if total == 0:
        return T, elim.labeling()

    rounds = 0
    while elim.bad:
        v1, v2 = min(elim.bad)
        elim.eliminate(v1, v2)
        rounds += 1
        if len(elim.bad) != total - rounds:
            raise InternalError(f"After round {rounds} there are {len(elim.bad)} bad edges, expected {total - rounds}")

    refined = elim.cx.freeze()
    labeling = elim.labeling()
    logger.info(
        "Good labeling after %d rounds: %d vertices, %d simplices", rounds, refined.vertex_count, len(refined.maximal)
    )
    if settings.CHECK_INVARIANTS:
        diagnostics.check_good_labeling(refined, labeling, O, P, anchors)
    return refined, labeling
