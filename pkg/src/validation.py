"""Acceptance predicates for solver, piercing and division outputs.

Each validator re-checks its object from scratch with exact arithmetic and
direct oracle calls, and returns a results dictionary whose ``"valid"`` key
is the conjunction of the individual checks.
"""

from __future__ import annotations

import itertools
import logging
from typing import TYPE_CHECKING, Any, Dict, Sequence

from src.exact_math import is_convex_combination, squared_distance

if TYPE_CHECKING:
    from src.cake import DivisionResult, PlayerOracle
    from src.cover import CoverOracle
    from src.d_interval import IntervalCover, PiercingResult, SeparatedCover
    from src.solver import SolveCertificate

logger = logging.getLogger(__name__)

# --- Solver certificates ---


def validate_certificate(cert: SolveCertificate, oracle: CoverOracle, k: int | None = None) -> Dict[str, Any]:
    """Checks shape, injectivity, memberships, the hull identity and the diameter bound.

    Args:
        cert (SolveCertificate): Certificate to check.
        oracle (CoverOracle): The cover the certificate claims membership in.
        k (int | None): Vertex count of the polytope; a maximal witness has k vertices.
            When None, only the tuples are checked against each other.

    Returns:
        Dict[str, Any]: Keys 'size', 'injective', 'memberships' (one bool per vertex),
        'hull_identity', 'diameter' (bool) and 'valid'.
    """
    expected = k if k is not None else len(cert.witness)
    results: Dict[str, Any] = {}
    lengths = {len(cert.pi), len(cert.faces), len(cert.face_vertices), len(cert.points), len(cert.anchors), len(cert.coeffs)}
    results["size"] = len(cert.witness) == expected and lengths == {expected}
    results["injective"] = len(set(cert.pi)) == len(cert.pi) and all(1 <= i <= oracle.n for i in cert.pi)
    results["memberships"] = [
        oracle.query(color, face_id, point) for color, face_id, point in zip(cert.pi, cert.faces, cert.points)
    ]
    results["hull_identity"] = is_convex_combination(cert.reference_point, list(cert.anchors), list(cert.coeffs))
    limit = cert.eps * cert.eps
    results["diameter"] = all(squared_distance(a, b) <= limit for a, b in itertools.combinations(cert.points, 2))
    results["valid"] = bool(
        results["size"]
        and results["injective"]
        and all(results["memberships"])
        and results["hull_identity"]
        and results["diameter"]
    )
    if not results["valid"]:
        logger.warning("Certificate validation failed: %s", results)
    return results


# --- Colourful matchings ---


def validate_matching(result: PiercingResult, oracle: IntervalCover | SeparatedCover) -> Dict[str, Any]:
    """Checks colourfulness, pairwise disjointness, witnessing and the size bound."""
    members = result.matching.members
    results: Dict[str, Any] = {}
    families = [f.family for f in members]
    results["colorful"] = len(set(families)) == len(families)
    results["disjoint"] = all(f.disjoint_from(g) for f, g in itertools.combinations(members, 2))
    results["witnessed"] = [
        f in oracle.witnesses(f.family, face_id, x)
        for f, face_id, x in zip(members, result.witness_faces, result.witness_points)
    ]
    results["size"] = len(members)
    results["bound"] = result.bound
    results["valid"] = bool(
        results["colorful"] and results["disjoint"] and all(results["witnessed"]) and len(members) >= result.bound
    )
    if not results["valid"]:
        logger.warning("Matching validation failed: %s", results)
    return results


# --- Allocations ---


def validate_allocation(result: DivisionResult, players: Sequence[PlayerOracle]) -> Dict[str, Any]:
    """Checks disjoint tuples, nonempty pieces, preferences at the partition and the size bound."""
    allocation = result.allocation
    partition = allocation.partition
    results: Dict[str, Any] = {}
    owners = [player for player, _ in allocation.assignments]
    results["distinct_players"] = len(set(owners)) == len(owners)
    results["disjoint"] = all(
        all(a != b for a, b in zip(s, t)) for (_, s), (_, t) in itertools.combinations(allocation.assignments, 2)
    )
    results["nonempty"] = all(partition.nonempty(T) for _, T in allocation.assignments)
    results["preferences"] = [players[player - 1].prefers(partition, T) for player, T in allocation.assignments]
    results["size"] = len(allocation)
    results["bound"] = result.bound
    results["valid"] = bool(
        results["distinct_players"]
        and results["disjoint"]
        and results["nonempty"]
        and all(results["preferences"])
        and len(allocation) >= result.bound
    )
    if not results["valid"]:
        logger.warning("Allocation validation failed: %s", results)
    return results

