"""Runtime checks for the elimination algorithm and its output.

Includes functions for:
- Queue depth bound during bad-edge elimination.
- Star shape of the chain vertices b(v_1, ..., v_j).
- Containment of newly created bad edges in the pending queues.
- Full re-verification of a good labeling.
- A summary report of a triangulation.

The two star/queue checks are expensive and run only with
`settings.CHECK_INVARIANTS`; the queue bound is always enforced.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, Callable, Dict, Mapping, Sequence

from src.errors import InternalError
from src.exact_math import in_convex_hull, rat_pair
from src.triangulation import Edge, Triangulation, edge_key, validate_triangulation

if TYPE_CHECKING:
    from src.bad_edge import Labeling
    from src.cover import CoverOracle
    from src.polytope import AnchorTable, PolytopeModel

logger = logging.getLogger(__name__)

# --- Elimination checks ---


def check_queue_bound(queues: Mapping[int, set[int]], k: int) -> None:
    """Queues Q_j with j ≥ k-1 must stay empty.

    Raises:
        InternalError: If a deep queue holds a vertex.
    """
    for j, queue in queues.items():
        if j >= k - 1 and queue:
            raise InternalError(f"Queue Q_{j} is nonempty ({sorted(queue)}) but must be empty for j >= {k - 1}")


def check_star_shape(
    star: Callable[[int], list[tuple[int, ...]]],
    stack: Sequence[int],
    chain: Mapping[int, int],
) -> None:
    """Every simplex around b(v_1..v_j) holds v_1 or v_2, and v_i or b(v_1..v_{i-1}) for 3 ≤ i ≤ j.

    Args:
        star (Callable): Returns the maximal simplices containing a vertex.
        stack (Sequence[int]): Current generators v_1, v_2, ... (0-based list).
        chain (Mapping[int, int]): j -> vertex id of b(v_1, ..., v_j), with chain[1] = v_1.

    Raises:
        InternalError: Naming the simplex that breaks the shape.
    """
    v1, v2 = stack[0], stack[1]
    for j, center in chain.items():
        if j < 2:
            continue
        for simplex in star(center):
            members = set(simplex)
            if v1 not in members and v2 not in members:
                raise InternalError(f"Simplex {list(simplex)} around chain vertex {center} misses both {v1} and {v2}")
            for i in range(3, j + 1):
                if stack[i - 1] not in members and chain[i - 1] not in members:
                    raise InternalError(
                        f"Simplex {list(simplex)} around chain vertex {center} misses "
                        f"both v_{i}={stack[i - 1]} and b_{i - 1}={chain[i - 1]}"
                    )


def check_new_bad_edges(
    current: set[Edge],
    original: set[Edge],
    queues: Mapping[int, set[int]],
    chain: Mapping[int, int],
) -> None:
    """Bad edges created during this elimination must all be pending in some queue.

    Raises:
        InternalError: Listing the unexpected bad edges.
    """
    pending = {edge_key(chain[j + 1], v) for j, queue in queues.items() if j + 1 in chain for v in queue}
    stray = (current - original) - pending
    if stray:
        raise InternalError(f"New bad edges {sorted(stray)} are not pending in any queue")


# --- Output checks ---


def check_good_labeling(
    T: Triangulation,
    L: Labeling,
    O: CoverOracle,
    P: PolytopeModel,
    anchors: AnchorTable | None = None,
) -> None:
    """Re-verifies membership, face and rainbow conditions of a labeling.

    Raises:
        InternalError: Naming the first vertex or simplex that fails.
    """
    for v in range(T.vertex_count):
        color, face_id = L.colors[v], L.faces[v]
        point = T.point(v)
        if not O.query(color, face_id, point):
            raise InternalError(f"Vertex {v} is not in A^{color}_{face_id}")
        if not P.is_subface(face_id, T.support_of(v)):
            raise InternalError(f"Face {face_id} of vertex {v} is not contained in its support")
        if in_convex_hull(L.anchors[v], P.face_points(face_id)) is None:
            raise InternalError(f"Anchor of vertex {v} lies outside face {face_id}")
        if anchors is not None and L.anchors[v] != anchors.get(color, face_id):
            raise InternalError(f"Anchor of vertex {v} differs from the anchor table")
    for simplex in T.maximal:
        colors = [L.colors[v] for v in simplex]
        if len(set(colors)) != len(colors):
            raise InternalError(f"Simplex {list(simplex)} is not rainbow: colours {colors}")


def check_triangulation(T: Triangulation) -> None:
    """Structural validation, re-raised as an internal error."""
    try:
        validate_triangulation(T)
    except ValueError as exc:
        raise InternalError(f"Invalid triangulation: {exc}") from exc


def triangulation_report(T: Triangulation, L: Labeling | None = None) -> Dict[str, Any]:
    """Summary counts for logs and the CLI result file.

    Args:
        T (Triangulation): Triangulation to summarize.
        L (Labeling | None): Optional labeling; adds colour usage and bad-edge count.

    Returns:
        Dict[str, Any]: Vertex/simplex/edge counts, squared diameter and volume.
    """
    report: Dict[str, Any] = {
        "vertices": T.vertex_count,
        "simplices": len(T.maximal),
        "edges": len(T.edges),
        "max_edge_sq": rat_pair(T.max_edge_sq()),
        "volume": rat_pair(T.total_volume()),
    }
    if L is not None:
        usage: Dict[int, int] = {}
        for color in L.colors.values():
            usage[color] = usage.get(color, 0) + 1
        report["color_usage"] = {str(c): usage[c] for c in sorted(usage)}
        report["bad_edges"] = sum(1 for a, b in T.edges if L.colors[a] == L.colors[b])
    logger.debug("Triangulation report: %s", report)
    return report
