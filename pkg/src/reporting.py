"""Result dictionaries and JSON serialization.

Provides:
- A custom JSON encoder (`RationalEncoder`) writing Fractions as
  ``[numerator, denominator]`` pairs and RatPoints as lists of pairs.
- Report builders for certificates, violations, colourful matchings,
  allocations and hypergraph invariants.
- `hypergraph_table`, the same hypergraph report as a pandas DataFrame for
  console output.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Dict, List

import numpy as np
import pandas as pd

from src.exact_math import RatPoint, rat_pair
from src.hypergraph import (
    Hypergraph,
    fractional_matching,
    furedi_matching_bound,
    maximum_matching,
    minimum_cover,
    perfect_fractional_matching,
    rank_lower_bound_nustar,
)

if TYPE_CHECKING:
    from src.cake import DivisionResult
    from src.cover import ViolationCertificate
    from src.d_interval import DInterval, PiercingInstance, PiercingResult
    from src.polytope import PolytopeModel
    from src.solver import SolveCertificate

logger = logging.getLogger(__name__)


# --- JSON Encoder for exact types ---
class RationalEncoder(json.JSONEncoder):
    """Serializes Fractions, RatPoints, tuples/frozensets and NumPy integers losslessly."""

    def default(self, obj: Any) -> Any:
        if isinstance(obj, Fraction):
            return rat_pair(obj)
        if isinstance(obj, RatPoint):
            return obj.to_pairs()
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        return super().default(obj)


def dumps(payload: Any) -> str:
    """Deterministic text: sorted keys, indent=2, trailing newline."""
    return json.dumps(payload, cls=RationalEncoder, indent=2, sort_keys=True) + "\n"


# --- Certificates and violations ---


def certificate_to_dict(cert: SolveCertificate) -> Dict[str, Any]:
    return {
        "pi": list(cert.pi),
        "faces": [list(verts) for verts in cert.face_vertices],
        "face_ids": list(cert.faces),
        "witness": [pt.to_pairs() for pt in cert.points],
        "witness_ids": list(cert.witness),
        "anchors": [pt.to_pairs() for pt in cert.anchors],
        "coeffs": [rat_pair(c) for c in cert.coeffs],
        "p": cert.reference_point.to_pairs(),
        "eps": rat_pair(cert.eps),
    }


def dumps_certificate(cert: SolveCertificate) -> str:
    return dumps(certificate_to_dict(cert))


def violation_to_dict(certificate: ViolationCertificate, polytope: PolytopeModel) -> Dict[str, Any]:
    return {
        "violation": "cover",
        "point": certificate.point.to_pairs(),
        "colors": list(certificate.colors),
        "support": list(polytope.face_vertices(certificate.support)),
    }


def hypothesis_violation_to_dict(colors: List[int], cover: List[Fraction], required: int) -> Dict[str, Any]:
    return {
        "violation": "hypothesis",
        "colors": list(colors),
        "cover": [rat_pair(z) for z in cover],
        "required": required,
    }


# --- Piercing and division ---


def _member_dict(f: DInterval) -> Dict[str, Any]:
    return {
        "family": f.family,
        "member": f.member,
        "components": [[rat_pair(a), rat_pair(b)] for a, b in f.components],
    }


def matching_to_dict(result: PiercingResult, instance: PiercingInstance) -> Dict[str, Any]:
    """Matched members in the instance's own coordinates plus the certificate."""
    return {
        "matching": [_member_dict(instance.member(key)) for key in result.matching.pairs],
        "size": len(result.matching),
        "bound": result.bound,
        "faces": [sorted(result.hypergraph.edges[i]) for i in result.matched_edges],
        "eps": rat_pair(result.eps),
        "certificate": certificate_to_dict(result.certificate),
    }


def allocation_to_dict(result: DivisionResult) -> Dict[str, Any]:
    partition = result.allocation.partition
    return {
        "allocation": [{"player": player, "pieces": list(T)} for player, T in result.allocation.assignments],
        "size": len(result.allocation),
        "bound": result.bound,
        "partition": {
            "cuts": [[rat_pair(c) for c in partition.cuts(t)] for t in range(partition.d)],
            "lengths": [[rat_pair(c) for c in block] for block in partition.lengths],
        },
        "eps": rat_pair(result.eps),
        "certificate": certificate_to_dict(result.certificate),
    }


# --- Hypergraphs ---


def hypergraph_report(H: Hypergraph, d: int | None = None) -> Dict[str, Any]:
    """ν, τ, ν* with optimal objects; Füredi and perfect-fractional bounds when they apply.

    Args:
        H (Hypergraph): Hypergraph to analyze.
        d (int | None): Rank bound; defaults to the rank of H.

    Returns:
        Dict[str, Any]: Report keyed by invariant name.
    """
    rank = d if d is not None else max(H.rank, 1)
    matching = maximum_matching(H)
    cover = minimum_cover(H)
    nu_star, weights = fractional_matching(H)
    report: Dict[str, Any] = {
        "vertices": H.vertices,
        "edges": len(H.edges),
        "rank": H.rank,
        "nu": len(matching),
        "matching": [sorted(H.edges[i]) for i in matching],
        "tau": len(cover),
        "cover": list(cover),
        "nu_star": rat_pair(nu_star),
        "fractional_weights": [rat_pair(w) for w in weights],
        "d_partite": H.parts is not None and len(H.parts) == rank,
    }
    if H.rank <= rank:
        report["furedi_bound"] = rat_pair(furedi_matching_bound(H, rank))
    perfect = perfect_fractional_matching(H)
    report["perfect_fractional_matching"] = [rat_pair(w) for w in perfect] if perfect is not None else None
    if perfect is not None and H.rank <= rank:
        report["nu_star_lower_bound"] = rat_pair(rank_lower_bound_nustar(H, rank))
    logger.debug("Hypergraph report: %s", report)
    return report


def hypergraph_table(report: Dict[str, Any]) -> pd.DataFrame:
    """One row per scalar invariant, rationals rendered as 'a/b'."""
    rows = []
    for key in ("vertices", "edges", "rank", "nu", "tau", "nu_star", "furedi_bound", "nu_star_lower_bound"):
        if key not in report:
            continue
        value = report[key]
        if isinstance(value, list):
            value = str(Fraction(value[0], value[1]))
        rows.append({"invariant": key, "value": str(value)})
    return pd.DataFrame(rows).set_index("invariant")
