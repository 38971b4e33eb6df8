"""Sparse colourful KKM solver.

Pipeline: initial triangulation -> refine to diameter eps -> good labeling
by bad-edge elimination -> search for a maximal simplex whose anchor images
capture the reference point p -> certificate, self-validated before return.

The certificate is a fixed-precision statement: the witness simplex has
diameter ≤ eps and its i-th vertex lies in A^{pi(i)}_{tau_i}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List

from src import diagnostics, validation
from src.bad_edge import Labeling, TraceSink, make_good
from src.config import settings
from src.cover import CoverOracle
from src.errors import InternalError
from src.exact_math import RatLike, RatPoint, as_rat, in_convex_hull
from src.polytope import AnchorTable, PolytopeModel, default_anchors
from src.triangulation import Triangulation, initial_triangulation, refine_to_diameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveCertificate:
    """Injection pi, faces tau and an eps-small witness simplex with hull coefficients.

    Entry i of every tuple refers to vertex i of the witness simplex.
    """

    pi: tuple[int, ...]
    faces: tuple[int, ...]
    face_vertices: tuple[tuple[int, ...], ...]
    witness: tuple[int, ...]
    points: tuple[RatPoint, ...]
    anchors: tuple[RatPoint, ...]
    coeffs: tuple[Fraction, ...]
    reference_point: RatPoint
    eps: Fraction

    @property
    def k(self) -> int:
        return len(self.witness)


@dataclass(frozen=True)
class SolveRun:
    """Certificate together with the refined triangulation and labeling it came from."""

    certificate: SolveCertificate
    triangulation: Triangulation
    labeling: Labeling


def panchromatic_search(
    T: Triangulation, L: Labeling, p: RatPoint
) -> tuple[tuple[int, ...], list[Fraction]]:
    """First maximal simplex σ (insertion order) with p ∈ conv{y(v) : v ∈ σ}.

    Args:
        T (Triangulation): Triangulation carrying a good labeling.
        L (Labeling): Labeling whose anchors satisfy the face condition.
        p (RatPoint): Reference point.

    Returns:
        tuple: The simplex (sorted vertex ids) and its convex coefficients.

    Raises:
        InternalError: If no maximal simplex captures p.
    """
    for simplex in T.maximal:
        coeffs = in_convex_hull(p, [L.anchors[v] for v in simplex])
        if coeffs is not None:
            return simplex, coeffs
    raise InternalError("No simplex captures p: labeling violates the face-support hypotheses")


def _certificate(
    P: PolytopeModel, T: Triangulation, L: Labeling, simplex: tuple[int, ...], coeffs: List[Fraction], eps: Fraction
) -> SolveCertificate:
    return SolveCertificate(
        pi=tuple(L.colors[v] for v in simplex),
        faces=tuple(L.faces[v] for v in simplex),
        face_vertices=tuple(P.face_vertices(L.faces[v]) for v in simplex),
        witness=tuple(simplex),
        points=tuple(T.point(v) for v in simplex),
        anchors=tuple(L.anchors[v] for v in simplex),
        coeffs=tuple(coeffs),
        reference_point=P.reference_point,
        eps=eps,
    )


def run_pipeline(
    P: PolytopeModel,
    O: CoverOracle,
    anchors: AnchorTable | None,
    eps: RatLike,
    trace: TraceSink | None = None,
) -> SolveRun:
    """Runs the full pipeline and keeps the intermediate triangulation and labeling.

    Args:
        P (PolytopeModel): Polytope with reference point p.
        O (CoverOracle): Cover with n ≥ k colours.
        anchors (AnchorTable | None): Anchor points; barycenters when None.
        eps (RatLike): Positive diameter bound.
        trace (TraceSink | None): Receives elimination trace records.

    Returns:
        SolveRun: Validated certificate plus T' and L.

    Raises:
        ValueError: If eps ≤ 0 or n < k.
        CoverViolation: If a vertex cannot be labeled.
        InternalError: If the search fails or the certificate does not validate.
    """
    eps_q = as_rat(eps)
    if eps_q <= 0:
        raise ValueError(f"eps must be positive, got {eps_q}")
    if O.n < P.k:
        raise ValueError(f"The cover needs n >= k colours, got n={O.n}, k={P.k}")
    table = anchors if anchors is not None else default_anchors(P, O.n)

    try:
        logger.info("Solve: k=%d, n=%d, eps=%s, polytope=%r", P.k, O.n, eps_q, P)
        base = initial_triangulation(P)
        refined = refine_to_diameter(base, eps_q)
        good, labeling = make_good(refined, O, P, table, trace)
        if settings.CHECK_INVARIANTS:
            diagnostics.check_triangulation(good)
        simplex, coeffs = panchromatic_search(good, labeling, P.reference_point)
        certificate = _certificate(P, good, labeling, simplex, coeffs, eps_q)
    except InternalError:
        logger.error("Solver contract violated", exc_info=True)
        raise

    result = validation.validate_certificate(certificate, O, P.k)
    if not result["valid"]:
        logger.error("Certificate failed validation: %s", result)
        raise InternalError(f"Certificate failed validation: {result}")
    logger.info("Panchromatic simplex %s with colours %s", list(simplex), list(certificate.pi))
    return SolveRun(certificate, good, labeling)


def solve(
    P: PolytopeModel,
    O: CoverOracle,
    anchors: AnchorTable | None,
    eps: RatLike,
    trace: TraceSink | None = None,
) -> SolveCertificate:
    """Returns a validated certificate: injection pi, faces tau, eps-witness and coefficients."""
    return run_pipeline(P, O, anchors, eps, trace).certificate


def solve_summary(run: SolveRun) -> Dict[str, Any]:
    """Triangulation report of a run plus the colours its labeling uses."""
    summary = diagnostics.triangulation_report(run.triangulation, run.labeling)
    summary["colors_used"] = sorted(set(run.labeling.colors.values()))
    return summary


def witness_neighborhood(run: SolveRun) -> Iterator[RatPoint]:
    """Points of the witness simplex in simplex order, the only candidates for extraction."""
    yield from run.certificate.points
