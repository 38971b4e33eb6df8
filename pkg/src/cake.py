"""Fair division of d cakes into m interval pieces each.

Handles:
- `Partition`: cut positions per cake, read off a point of (Δ^{m-1})^d.
- Player models: `HungryMaxPlayer` (piecewise-constant densities, prefers
  the heaviest nonempty piece of every cake) and `ScriptedPlayer`.
- `preference_cover_oracle`: A^i_{v_T} = partitions where player i prefers T.
- `check_hungry`: sampling check of the (m, d)-hungry condition.
- `divide`: solve with k = d(m-1)+1, match the certificate's piece tuples
  and allocate them to players at a single partition.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence

from src import validation
from src.bad_edge import TraceSink
from src.config import settings
from src.cover import CoverOracle, ViolationCertificate, falsify_weak_cover
from src.errors import InternalError
from src.exact_math import RatLike, RatPoint, as_rat
from src.hypergraph import Hypergraph, is_perfect_fractional_matching, maximum_matching, product_hypergraph
from src.polytope import PolytopeModel, simplex_product
from src.solver import SolveCertificate, SolveRun, run_pipeline, witness_neighborhood

logger = logging.getLogger(__name__)

PieceTuple = tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    """Cuts of d cakes; `lengths[t][j-1]` is the length of piece j of cake t."""

    lengths: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        for t, block in enumerate(self.lengths):
            if any(c < 0 for c in block) or sum(block, Fraction(0)) != 1:
                raise ValueError(f"Cake {t + 1} piece lengths {list(block)} are not a partition of [0, 1]")

    @classmethod
    def from_point(cls, x: RatPoint, m: int, d: int) -> Partition:
        if x.dim != m * d:
            raise ValueError(f"Point of dimension {x.dim} does not describe {d} cakes of {m} pieces")
        return cls(tuple(tuple(x.coords[t * m : (t + 1) * m]) for t in range(d)))

    @property
    def m(self) -> int:
        return len(self.lengths[0])

    @property
    def d(self) -> int:
        return len(self.lengths)

    def cuts(self, t: int) -> List[Fraction]:
        """Interior cut positions p(1), ..., p(m-1) of cake t (0-based cake index)."""
        out: List[Fraction] = []
        total = Fraction(0)
        for length in self.lengths[t][:-1]:
            total += length
            out.append(total)
        return out

    def piece(self, t: int, j: int) -> tuple[Fraction, Fraction]:
        """Piece j (1-based) of cake t (0-based) as (left, right)."""
        left = sum(self.lengths[t][: j - 1], Fraction(0))
        return left, left + self.lengths[t][j - 1]

    def nonempty(self, T: PieceTuple) -> bool:
        return all(self.lengths[t][j - 1] > 0 for t, j in enumerate(T))


# --- Players ---


class PlayerOracle:
    """prefers(partition, T): whether the player accepts piece tuple T (1-based per cake)."""

    def prefers(self, partition: Partition, T: PieceTuple) -> bool:
        raise NotImplementedError


class HungryMaxPlayer(PlayerOracle):
    """Step densities per cake given as (c, from, to) with 0 ≤ from ≤ to ≤ 1.

    The player prefers exactly one tuple: in every cake the nonempty piece of
    largest measure, smallest index on ties. This maximizes the total measure.
    """

    def __init__(self, densities: Sequence[Sequence[Sequence[RatLike]]]) -> None:
        steps = []
        for t, cake in enumerate(densities):
            parsed = []
            for step in cake:
                c, lo, hi = (as_rat(v) for v in step)
                if c < 0 or not 0 <= lo <= hi <= 1:
                    raise ValueError(f"Invalid density step {[c, lo, hi]} in cake {t + 1}")
                parsed.append((c, lo, hi))
            steps.append(tuple(parsed))
        self.densities: tuple[tuple[tuple[Fraction, Fraction, Fraction], ...], ...] = tuple(steps)

    def measure(self, t: int, left: Fraction, right: Fraction) -> Fraction:
        total = Fraction(0)
        for c, lo, hi in self.densities[t]:
            overlap = min(hi, right) - max(lo, left)
            if overlap > 0:
                total += c * overlap
        return total

    def favorite(self, partition: Partition) -> PieceTuple:
        if partition.d != len(self.densities):
            raise ValueError(f"Player has densities for {len(self.densities)} cakes, partition has {partition.d}")
        choice = []
        for t in range(partition.d):
            best_j, best = 0, Fraction(-1)
            for j in range(1, partition.m + 1):
                if partition.lengths[t][j - 1] == 0:
                    continue
                value = self.measure(t, *partition.piece(t, j))
                if value > best:
                    best_j, best = j, value
            choice.append(best_j)
        return tuple(choice)

    def prefers(self, partition: Partition, T: PieceTuple) -> bool:
        return self.favorite(partition) == tuple(T)


class ScriptedPlayer(PlayerOracle):
    """Wraps ``fn(partition, T) -> bool``."""

    def __init__(self, fn: Callable[[Partition, PieceTuple], bool]) -> None:
        self._fn = fn

    def prefers(self, partition: Partition, T: PieceTuple) -> bool:
        return bool(self._fn(partition, tuple(T)))


# --- Cover and hunger check ---


class PreferenceCover(CoverOracle):
    """A^i_{v_T} = {x : player i prefers T at x}; faces of positive dimension are empty."""

    def __init__(self, players: Sequence[PlayerOracle], m: int, d: int, polytope: PolytopeModel | None = None) -> None:
        super().__init__(len(players))
        self.players = tuple(players)
        self.m = m
        self.d = d
        self.polytope = polytope if polytope is not None else simplex_product(m, d)

    def tuple_of(self, face_id: int) -> PieceTuple | None:
        face = self.polytope.face(face_id)
        if face.dim != 0:
            return None
        assert self.polytope.vertex_labels is not None
        return self.polytope.vertex_labels[face.vertex_ids[0]]

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        T = self.tuple_of(face_id)
        if T is None:
            return False
        return self.players[color - 1].prefers(Partition.from_point(x, self.m, self.d), T)


def preference_cover_oracle(players: Sequence[PlayerOracle], m: int, d: int) -> PreferenceCover:
    """Cover on (Δ^{m-1})^d built from player preferences.

    Raises:
        ValueError: If n < d(m-1)+1.
    """
    need = d * (m - 1) + 1
    if len(players) < need:
        raise ValueError(f"Need at least d(m-1)+1 = {need} players, got {len(players)}")
    return PreferenceCover(players, m, d)


def check_hungry(
    players: Sequence[PlayerOracle], m: int, d: int, *, samples: int | None = None, seed: int = 0
) -> ViolationCertificate | None:
    """Samples partitions looking for n-d(m-1) players none of whom prefers a nonempty tuple."""
    oracle = preference_cover_oracle(players, m, d)
    count = settings.COVER_SAMPLES if samples is None else samples
    return falsify_weak_cover(oracle, oracle.polytope, oracle.polytope.k, count, seed)


# --- Divide ---


@dataclass(frozen=True)
class Allocation:
    """Players (1-based) with their piece tuples, all evaluated at `partition`."""

    assignments: tuple[tuple[int, PieceTuple], ...]
    partition: Partition

    def __len__(self) -> int:
        return len(self.assignments)

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(player for player, _ in self.assignments)


@dataclass(frozen=True)
class DivisionResult:
    allocation: Allocation
    certificate: SolveCertificate
    hypergraph: Hypergraph
    matched_edges: tuple[int, ...]
    bound: int
    eps: Fraction


def allocation_bound(m: int, d: int) -> int:
    """⌈m/(d-1)⌉ for d ≥ 2, m for a single cake."""
    return m if d == 1 else -(-m // (d - 1))


def _tuples(cert: SolveCertificate, P: PolytopeModel) -> List[PieceTuple]:
    assert P.vertex_labels is not None
    return [P.vertex_labels[verts[0]] for verts in cert.face_vertices]


def _common_partition(
    run: SolveRun, matched: Sequence[int], tuples: Sequence[PieceTuple], oracle: PreferenceCover
) -> Partition | None:
    cert = run.certificate
    for x in witness_neighborhood(run):
        partition = Partition.from_point(x, oracle.m, oracle.d)
        if all(oracle.players[cert.pi[i] - 1].prefers(partition, tuples[i]) for i in matched):
            return partition
    return None


def divide(
    players: Sequence[PlayerOracle],
    m: int,
    d: int,
    eps: RatLike,
    trace: TraceSink | None = None,
) -> DivisionResult:
    """Allocates pairwise disjoint preferred piece tuples to at least the guaranteed number of players.

    Args:
        players (Sequence[PlayerOracle]): n ≥ d(m-1)+1 players.
        m (int): Pieces per cake.
        d (int): Number of cakes.
        eps (RatLike): Starting triangulation diameter; halved on extraction failure.
        trace (TraceSink | None): Receives elimination trace records.

    Returns:
        DivisionResult: Validated allocation with its certificate.

    Raises:
        ValueError: If there are too few players or eps ≤ 0.
        InternalError: If no common partition is found after EPS_RETRY_CAP halvings.
    """
    oracle = preference_cover_oracle(players, m, d)
    P = oracle.polytope
    current = as_rat(eps)
    logger.info("Divide: %d players, %d cakes, %d pieces, eps=%s", len(players), d, m, current)

    for attempt in range(settings.EPS_RETRY_CAP + 1):
        run = run_pipeline(P, oracle, None, current, trace)
        cert = run.certificate
        tuples = _tuples(cert, P)
        H = product_hypergraph(tuples, m, d)
        weights = [m * c for c in cert.coeffs]
        if not is_perfect_fractional_matching(H, weights):
            raise InternalError(f"Hull coefficients {weights} are not a perfect fractional matching")
        matched = maximum_matching(H)
        partition = _common_partition(run, matched, tuples, oracle)
        if partition is not None:
            allocation = Allocation(tuple((cert.pi[i], tuples[i]) for i in matched), partition)
            result = DivisionResult(allocation, cert, H, tuple(matched), allocation_bound(m, d), current)
            report = validation.validate_allocation(result, players)
            if not report["valid"]:
                raise InternalError(f"Allocation failed validation: {report}")
            logger.info("Allocated %d players (bound %d): %s", len(allocation), result.bound, allocation.assignments)
            return result
        logger.warning("Matched players disagree at every vertex for eps=%s (attempt %d); halving eps", current, attempt + 1)
        current = current / 2
    raise InternalError(f"No common partition found after {settings.EPS_RETRY_CAP} eps halvings")

