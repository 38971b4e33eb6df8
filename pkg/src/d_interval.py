"""Colourful matchings of d-intervals via the sparse KKM solver.

Handles:
- `DInterval` / `PiercingInstance`: families F_1..F_n of d-intervals in the
  general variant (any components, solved on Δ^{k-1}) or the separated
  variant (t-th component inside (t-1, t), solved on (Δ^{m-1})^d).
- Normalization of the real line into (0, 1) per variant.
- The exact piercing hypothesis check over every admissible colour subset.
- `interval_cover_oracle` / `separated_cover_oracle`: the prefix-sum covers.
- `pierce`: solve, build the face hypergraph, take a maximum matching and
  extract one pairwise-disjoint witnessing member per matched face.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Sequence

from src import validation
from src.bad_edge import TraceSink
from src.config import settings
from src.cover import CoverOracle
from src.errors import HypothesisViolation, InternalError
from src.exact_math import RatLike, RatPoint, as_rat
from src.hypergraph import (
    Hypergraph,
    is_perfect_fractional_matching,
    maximum_matching,
    minimum_cover,
    product_hypergraph,
)
from src.polytope import PolytopeModel, simplex, simplex_product
from src.solver import SolveCertificate, SolveRun, run_pipeline, witness_neighborhood

logger = logging.getLogger(__name__)

Component = tuple[Fraction, Fraction]


class Variant(str, enum.Enum):
    GENERAL = "general"
    SEPARATED = "separated"


@dataclass(frozen=True)
class DInterval:
    """Union of closed intervals; `family` is the colour (1-based), `member` its index in the family."""

    family: int
    member: int
    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError(f"d-interval {self.key} has no components")
        for a, b in self.components:
            if a > b:
                raise ValueError(f"d-interval {self.key} has an inverted component [{a}, {b}]")

    @property
    def key(self) -> tuple[int, int]:
        return (self.family, self.member)

    def contains_point(self, z: Fraction) -> bool:
        return any(a <= z <= b for a, b in self.components)

    def disjoint_from(self, other: DInterval) -> bool:
        return all(b1 < a2 or b2 < a1 for a1, b1 in self.components for a2, b2 in other.components)

    def mapped(self, fn: Callable[[int, Fraction], Fraction]) -> DInterval:
        """Applies fn(component index, endpoint) to every endpoint."""
        return DInterval(self.family, self.member, tuple((fn(t, a), fn(t, b)) for t, (a, b) in enumerate(self.components)))


@dataclass(frozen=True)
class PiercingInstance:
    """n families of d-intervals with the variant's size parameter (k or m)."""

    variant: Variant
    d: int
    families: tuple[tuple[DInterval, ...], ...]
    k: int | None = None
    m: int | None = None
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        for i, family in enumerate(self.families, start=1):
            for f in family:
                if f.family != i:
                    raise ValueError(f"Member {f.key} is stored in family {i}")
        if self.variant is Variant.GENERAL:
            if self.k is None:
                raise ValueError("The general variant needs k")
            if self.k < 2 or self.d >= self.k:
                raise ValueError(
                    f"The general variant needs 2 <= k and d < k, since T = [k] is not a proper face; got k={self.k}, d={self.d}"
                )
            if self.n < self.k:
                raise ValueError(f"Need n >= k families, got n={self.n}, k={self.k}")
            for f in self.members():
                if len(f.components) > self.d:
                    raise ValueError(f"Member {f.key} has {len(f.components)} components, more than d={self.d}")
        else:
            if self.m is None or self.m < 2:
                raise ValueError(f"The separated variant needs m >= 2, got m={self.m}")
            if self.n < self.required_cover:
                raise ValueError(f"Need n >= (m-1)d+1 = {self.required_cover} families, got {self.n}")
            for f in self.members():
                if len(f.components) != self.d:
                    raise ValueError(f"Member {f.key} needs exactly d={self.d} components")
                for t, (a, b) in enumerate(f.components):
                    lo, hi = (0, 1) if self.normalized else (t, t + 1)
                    if not (lo < a and b < hi):
                        raise ValueError(f"Component {t + 1} of member {f.key} is not inside ({lo}, {hi})")

    @classmethod
    def build(
        cls,
        variant: Variant | str,
        d: int,
        families: Sequence[Sequence[Sequence[Sequence[RatLike]]]],
        *,
        k: int | None = None,
        m: int | None = None,
    ) -> PiercingInstance:
        """Builds an instance from nested lists: families -> members -> components -> [a, b]."""
        built = tuple(
            tuple(
                DInterval(i, j, tuple((as_rat(a), as_rat(b)) for a, b in member))
                for j, member in enumerate(family)
            )
            for i, family in enumerate(families, start=1)
        )
        return cls(Variant(variant), d, built, k=k, m=m)

    @property
    def n(self) -> int:
        return len(self.families)

    @property
    def solver_k(self) -> int:
        if self.variant is Variant.GENERAL:
            assert self.k is not None
            return self.k
        assert self.m is not None
        return self.d * (self.m - 1) + 1

    @property
    def required_cover(self) -> int:
        """Piercing number every admissible union must reach."""
        if self.variant is Variant.GENERAL:
            assert self.k is not None
            return self.k
        assert self.m is not None
        return (self.m - 1) * self.d + 1

    @property
    def subset_size(self) -> int:
        """Size of the colour subsets I the hypothesis quantifies over."""
        return self.n - self.required_cover + 1

    @property
    def guaranteed_size(self) -> int:
        """Lower bound on the colourful matching size."""
        if self.variant is Variant.GENERAL:
            assert self.k is not None
            return -(-self.k // (self.d * self.d - self.d + 1))
        assert self.m is not None
        if self.d == 1:
            return self.m
        return -(-self.m // (self.d - 1))

    def members(self, colors: Iterable[int] | None = None) -> List[DInterval]:
        chosen = range(1, self.n + 1) if colors is None else colors
        return [f for i in chosen for f in self.families[i - 1]]

    def member(self, key: tuple[int, int]) -> DInterval:
        return self.families[key[0] - 1][key[1]]

    def polytope(self) -> PolytopeModel:
        if self.variant is Variant.GENERAL:
            return simplex(self.solver_k)
        assert self.m is not None
        return simplex_product(self.m, self.d)


# --- Normalization ---


def normalize(instance: PiercingInstance) -> PiercingInstance:
    """Moves every member into (0, 1) coordinates.

    General: the affine map sending [min endpoint - 1, max endpoint + 1] onto
    [0, 1]. Separated: component t is translated from (t-1, t) onto (0, 1).
    Member ids are preserved, so results map back to the raw instance.
    """
    if instance.normalized:
        return instance
    if instance.variant is Variant.GENERAL:
        endpoints = [z for f in instance.members() for comp in f.components for z in comp]
        if endpoints:
            lo, hi = min(endpoints) - 1, max(endpoints) + 1
        else:
            lo, hi = Fraction(0), Fraction(1)
        width = hi - lo

        def fn(t: int, z: Fraction) -> Fraction:
            return (z - lo) / width
    else:

        def fn(t: int, z: Fraction) -> Fraction:
            return z - t

    families = tuple(tuple(f.mapped(fn) for f in family) for family in instance.families)
    return PiercingInstance(instance.variant, instance.d, families, k=instance.k, m=instance.m, normalized=True)


def default_eps(instance: PiercingInstance) -> Fraction:
    """Minimum gap between distinct normalized endpoints (and 0, 1) over EPS_GAP_DIVISOR."""
    norm = normalize(instance)
    groups: dict[int, set[Fraction]] = {}
    for f in norm.members():
        for t, comp in enumerate(f.components):
            cake = t if norm.variant is Variant.SEPARATED else 0
            groups.setdefault(cake, {Fraction(0), Fraction(1)}).update(comp)
    gaps = [b - a for values in groups.values() for a, b in itertools.pairwise(sorted(values))]
    gap = min(gaps, default=Fraction(1))
    return gap / settings.EPS_GAP_DIVISOR


# --- Prefix-sum covers ---


def prefix_points(x: RatPoint | Sequence[Fraction]) -> List[Fraction]:
    """p_x(1), ..., p_x(k) for a point on the standard simplex.

    Raises:
        ValueError: If x has a negative entry or does not sum to 1.
    """
    coords = list(x)
    if any(c < 0 for c in coords) or sum(coords, Fraction(0)) != 1:
        raise ValueError(f"{coords} is not on the standard simplex")
    return list(itertools.accumulate(coords))


def _fits_pieces(f: DInterval, pieces: Sequence[Component]) -> bool:
    """f lies inside the union of the open pieces and meets each of them."""
    for a, b in f.components:
        if not any(lo < a and b < hi for lo, hi in pieces):
            return False
    return all(lo < hi and any(a < hi and b > lo for a, b in f.components) for lo, hi in pieces)


class IntervalCover(CoverOracle):
    """A^i_T on Δ^{k-1}: some f ∈ F_i lies in ∪_{j∈T} (p_x(j-1), p_x(j)) and meets each piece.

    Faces with |T| > d receive empty sets.
    """

    def __init__(self, instance: PiercingInstance, polytope: PolytopeModel) -> None:
        if instance.variant is not Variant.GENERAL or not instance.normalized:
            raise ValueError("IntervalCover needs a normalized general instance")
        super().__init__(instance.n)
        self.instance = instance
        self.polytope = polytope

    def witnesses(self, color: int, face_id: int, x: RatPoint) -> List[DInterval]:
        T = [j + 1 for j in self.polytope.face_vertices(face_id)]
        if len(T) > self.instance.d:
            return []
        p = [Fraction(0), *prefix_points(x)]
        pieces = [(p[j - 1], p[j]) for j in T]
        return [f for f in self.instance.families[color - 1] if _fits_pieces(f, pieces)]

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        return bool(self.witnesses(color, face_id, x))


class SeparatedCover(CoverOracle):
    """A^i_{v_T} on (Δ^{m-1})^d: some f ∈ F_i has f^t inside the j_t-th open piece of cake t.

    Faces of positive dimension receive empty sets.
    """

    def __init__(self, instance: PiercingInstance, polytope: PolytopeModel) -> None:
        if instance.variant is not Variant.SEPARATED or not instance.normalized:
            raise ValueError("SeparatedCover needs a normalized separated instance")
        super().__init__(instance.n)
        self.instance = instance
        self.polytope = polytope

    def witnesses(self, color: int, face_id: int, x: RatPoint) -> List[DInterval]:
        face = self.polytope.face(face_id)
        if face.dim != 0:
            return []
        assert self.instance.m is not None and self.polytope.vertex_labels is not None
        m = self.instance.m
        label = self.polytope.vertex_labels[face.vertex_ids[0]]
        pieces = []
        for t, j in enumerate(label):
            p = [Fraction(0), *prefix_points(x.coords[t * m : (t + 1) * m])]
            pieces.append((p[j - 1], p[j]))
        return [
            f
            for f in self.instance.families[color - 1]
            if all(lo < a and b < hi for (a, b), (lo, hi) in zip(f.components, pieces))
        ]

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        return bool(self.witnesses(color, face_id, x))


def interval_cover_oracle(instance: PiercingInstance) -> IntervalCover:
    norm = normalize(instance)
    return IntervalCover(norm, norm.polytope())


def separated_cover_oracle(instance: PiercingInstance) -> SeparatedCover:
    norm = normalize(instance)
    return SeparatedCover(norm, norm.polytope())


# --- Hypothesis ---


def piercing_hypergraph(members: Sequence[DInterval]) -> tuple[Hypergraph, List[Fraction]]:
    """Hypergraph on candidate piercing points (all right endpoints), one edge per distinct member.

    A minimum piercing set can always be moved onto right endpoints, so
    τ of this hypergraph equals the piercing number of the members.
    """
    points = sorted({b for f in members for _, b in f.components})
    edges = {frozenset(idx for idx, z in enumerate(points) if f.contains_point(z)) for f in members}
    return Hypergraph.of(len(points), sorted(edges, key=sorted)), points


def _cake_coordinates(instance: PiercingInstance) -> PiercingInstance:
    """Separated normalized members back in raw coordinates, component t on (t, t+1)."""
    if not (instance.normalized and instance.variant is Variant.SEPARATED):
        return instance

    def fn(t: int, z: Fraction) -> Fraction:
        return z + t

    families = tuple(tuple(f.mapped(fn) for f in family) for family in instance.families)
    return PiercingInstance(instance.variant, instance.d, families, k=instance.k, m=instance.m)


def check_hypothesis(instance: PiercingInstance, *, enforce_cap: bool = True) -> None:
    """Checks τ(∪_{i∈I} F_i) against the variant's requirement for every admissible I.

    Raises:
        ValueError: If n exceeds HYPOTHESIS_FAMILY_CAP and the cap is enforced.
        HypothesisViolation: With the first failing I and a minimum piercing set.
    """
    cap = settings.HYPOTHESIS_FAMILY_CAP
    if enforce_cap and instance.n > cap:
        raise ValueError(f"Hypothesis check is capped at n <= {cap} families, got {instance.n}")
    instance = _cake_coordinates(instance)
    required = instance.required_cover
    for colors in itertools.combinations(range(1, instance.n + 1), instance.subset_size):
        H, points = piercing_hypergraph(instance.members(colors))
        cover = minimum_cover(H)
        if len(cover) < required:
            pierced = [points[c] for c in cover]
            logger.warning("Families %s are pierced by %d points: %s", colors, len(pierced), pierced)
            raise HypothesisViolation(colors, pierced, required)
    logger.info("Piercing hypothesis holds for all %d-subsets of %d families", instance.subset_size, instance.n)


# --- Pierce ---


@dataclass(frozen=True)
class ColorfulMatching:
    """Pairwise disjoint members, at most one per family."""

    members: tuple[DInterval, ...]

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(f.key for f in self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class PiercingResult:
    """Matching in normalized coordinates, with the faces and points that witness each member."""

    matching: ColorfulMatching
    witness_points: tuple[RatPoint, ...]
    witness_faces: tuple[int, ...]
    certificate: SolveCertificate
    hypergraph: Hypergraph
    matched_edges: tuple[int, ...]
    bound: int
    eps: Fraction
    weights: tuple[Fraction, ...] = field(default=())


def face_hypergraph(instance: PiercingInstance, P: PolytopeModel, cert: SolveCertificate) -> tuple[Hypergraph, tuple[Fraction, ...]]:
    """Hypergraph of the certificate's faces and the perfect fractional matching read off its coefficients.

    Raises:
        InternalError: If a face is too large or the weights are not a perfect fractional matching.
    """
    if instance.variant is Variant.GENERAL:
        k = instance.solver_k
        for verts in cert.face_vertices:
            if len(verts) > instance.d:
                raise InternalError(f"Face {list(verts)} has more than d={instance.d} vertices")
        H = Hypergraph.of(k, cert.face_vertices)
        weights = tuple(c * k / len(verts) for c, verts in zip(cert.coeffs, cert.face_vertices))
    else:
        assert instance.m is not None and P.vertex_labels is not None
        labels = [P.vertex_labels[verts[0]] for verts in cert.face_vertices]
        H = product_hypergraph(labels, instance.m, instance.d)
        weights = tuple(instance.m * c for c in cert.coeffs)
    if not is_perfect_fractional_matching(H, weights):
        raise InternalError(f"Hull coefficients {list(weights)} are not a perfect fractional matching")
    return H, weights


def select_disjoint(options: Sequence[Sequence[DInterval]]) -> List[DInterval] | None:
    """One member per option list, pairwise disjoint, by backtracking in list order."""
    chosen: List[DInterval] = []

    def search(i: int) -> bool:
        if i == len(options):
            return True
        for f in options[i]:
            if all(f.disjoint_from(g) for g in chosen):
                chosen.append(f)
                if search(i + 1):
                    return True
                chosen.pop()
        return False

    return chosen if search(0) else None


def _extract(
    run: SolveRun, matched: Sequence[int], oracle: IntervalCover | SeparatedCover
) -> tuple[List[DInterval], List[RatPoint]] | None:
    cert = run.certificate
    own = [cert.points[i] for i in matched]
    chosen = select_disjoint([oracle.witnesses(cert.pi[i], cert.faces[i], x) for i, x in zip(matched, own)])
    if chosen is not None:
        return chosen, own
    for x in witness_neighborhood(run):
        options = [oracle.witnesses(cert.pi[i], cert.faces[i], x) for i in matched]
        if all(options):
            chosen = select_disjoint(options)
            if chosen is not None:
                return chosen, [x] * len(matched)
    return None


def pierce(
    instance: PiercingInstance,
    eps: RatLike | None = None,
    *,
    check: bool = True,
    enforce_cap: bool = True,
    trace: TraceSink | None = None,
) -> PiercingResult:
    """Finds a colourful matching of the guaranteed size.

    Args:
        instance (PiercingInstance): Raw (or normalized) instance.
        eps (RatLike | None): Triangulation diameter; `default_eps` when None.
        check (bool): Run the exact hypothesis check first.
        enforce_cap (bool): Apply HYPOTHESIS_FAMILY_CAP to the check.
        trace (TraceSink | None): Receives elimination trace records.

    Returns:
        PiercingResult: Validated matching with its certificate.

    Raises:
        HypothesisViolation: If the hypothesis check fails.
        CoverViolation: If a triangulation vertex cannot be labeled.
        InternalError: If extraction fails after EPS_RETRY_CAP halvings or the result is invalid.
    """
    if check:
        check_hypothesis(instance, enforce_cap=enforce_cap)
    norm = normalize(instance)
    P = norm.polytope()
    oracle: IntervalCover | SeparatedCover
    oracle = IntervalCover(norm, P) if norm.variant is Variant.GENERAL else SeparatedCover(norm, P)
    current = as_rat(eps) if eps is not None else default_eps(norm)
    logger.info("Pierce: variant=%s, d=%d, n=%d, solver k=%d, eps=%s", norm.variant.value, norm.d, norm.n, P.k, current)

    for attempt in range(settings.EPS_RETRY_CAP + 1):
        run = run_pipeline(P, oracle, None, current, trace)
        cert = run.certificate
        H, weights = face_hypergraph(norm, P, cert)
        matched = maximum_matching(H)
        extracted = _extract(run, matched, oracle)
        if extracted is not None:
            members, points = extracted
            result = PiercingResult(
                matching=ColorfulMatching(tuple(members)),
                witness_points=tuple(points),
                witness_faces=tuple(cert.faces[i] for i in matched),
                certificate=cert,
                hypergraph=H,
                matched_edges=tuple(matched),
                bound=norm.guaranteed_size,
                eps=current,
                weights=weights,
            )
            report = validation.validate_matching(result, oracle)
            if not report["valid"]:
                raise InternalError(f"Colourful matching failed validation: {report}")
            logger.info("Colourful matching of size %d (bound %d): %s", len(members), result.bound, result.matching.pairs)
            return result
        logger.warning("No disjoint witnesses at eps=%s (attempt %d); halving eps", current, attempt + 1)
        current = current / 2
    raise InternalError(f"Witness extraction failed after {settings.EPS_RETRY_CAP} eps halvings")


def raw_members(instance: PiercingInstance, result: PiercingResult) -> List[DInterval]:
    """Matched members in the instance's own coordinates."""
    return [instance.member(key) for key in result.matching.pairs]

