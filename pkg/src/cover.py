"""Membership oracles for m-weakly Komiya covers.

Provides:
- `CoverOracle`, the base interface: `query(color, face_id, x)` decides
  x ∈ A^color_face for colours 1..n and faces of F(P).
- Built-in oracles: `ArgmaxCover` (weighted half-space cover of a simplex or a
  product of simplices), `NearestVertexCover` (any polytope), `EmptyCover`,
  and `FunctionCover` wrapping an arbitrary callable.
- `ViolationCertificate` and `falsify_weak_cover`, which samples face
  interiors looking for a point no admissible colour subset covers.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from src.exact_math import RatPoint, squared_distance
from src.polytope import WHOLE_POLYTOPE, PolytopeModel

logger = logging.getLogger(__name__)


class Openness(enum.Enum):
    CLOSED = "closed"
    OPEN = "open"


class CoverOracle:
    """Family (A^i_τ | i ∈ [n], τ ∈ F(P)) exposed through membership queries.

    Subclasses implement `query`; it must be a pure function of its inputs.
    """

    def __init__(self, n: int, openness: Openness = Openness.CLOSED) -> None:
        if n < 1:
            raise ValueError(f"A cover needs at least one colour, got n={n}")
        self.n = n
        self.openness = openness

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


class FunctionCover(CoverOracle):
    """Adapter for a plain ``fn(color, face_id, x) -> bool``."""

    def __init__(
        self,
        n: int,
        fn: Callable[[int, int, RatPoint], bool],
        openness: Openness = Openness.CLOSED,
    ) -> None:
        super().__init__(n, openness)
        self._fn = fn

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        return bool(self._fn(color, face_id, x))


class EmptyCover(CoverOracle):
    """Every set empty; any labeling attempt fails."""

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        return False


class ArgmaxCover(CoverOracle):
    """Weighted argmax cover on a simplex or a product of simplices.

    For colour i, the vertex face v_T with T = (j_1, ..., j_d) receives
    A^i_T = {x : w^i_{t,j_t} x^t_{j_t} ≥ w^i_{t,l} x^t_l for every factor t and index l},
    an intersection of closed half-spaces; faces of positive dimension are empty.
    Every point has a maximizing tuple inside its support, so each nonempty
    colour alone is a Komiya cover. On Δ^1 with unit weights this is the
    half-cover A_{v_1} = [e_1, mid], A_{v_2} = [mid, e_2].
    """

    def __init__(
        self,
        polytope: PolytopeModel,
        n: int,
        weights: Mapping[int, Sequence[Fraction]] | None = None,
        empty_colors: Sequence[int] = (),
    ) -> None:
        super().__init__(n)
        if polytope.factor_sizes is None or polytope.vertex_labels is None:
            raise ValueError("ArgmaxCover needs a simplex or a product of simplices")
        self._sizes = polytope.factor_sizes
        self._polytope = polytope
        self._empty = frozenset(empty_colors)
        for color in self._empty:
            if not 1 <= color <= n:
                raise ValueError(f"Empty colour {color} outside [1, {n}]")
        total = sum(self._sizes)
        self._weights: dict[int, tuple[Fraction, ...]] = {}
        for color in range(1, n + 1):
            w = tuple(Fraction(v) for v in (weights or {}).get(color, [1] * total))
            if len(w) != total or any(v <= 0 for v in w):
                raise ValueError(f"Colour {color} needs {total} positive weights, got {list(w)}")
            self._weights[color] = w

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        if color in self._empty:
            return False
        face = self._polytope.face(face_id)
        if face.dim != 0:
            return False
        assert self._polytope.vertex_labels is not None
        label = self._polytope.vertex_labels[face.vertex_ids[0]]
        w = self._weights[color]
        start = 0
        for t, size in enumerate(self._sizes):
            scores = [w[start + l] * x[start + l] for l in range(size)]
            if scores[label[t] - 1] < max(scores):
                return False
            start += size
        return True


class NearestVertexCover(CoverOracle):
    """A_{v} = points of P whose nearest vertex among the vertices of supp(x) is v.

    Works for any polytope; only vertex faces are nonempty.
    """

    def __init__(self, polytope: PolytopeModel, n: int, empty_colors: Sequence[int] = ()) -> None:
        super().__init__(n)
        self._polytope = polytope
        self._empty = frozenset(empty_colors)

    def query(self, color: int, face_id: int, x: RatPoint) -> bool:
        if color in self._empty:
            return False
        face = self._polytope.face(face_id)
        if face.dim != 0:
            return False
        candidates = self._polytope.face_vertices(self._polytope.support(x))
        vertex = face.vertex_ids[0]
        if vertex not in candidates:
            return False
        own = squared_distance(x, self._polytope.vertices[vertex])
        return all(own <= squared_distance(x, self._polytope.vertices[u]) for u in candidates)


# --- Falsification ---


@dataclass(frozen=True)
class ViolationCertificate:
    """A point x with support σ that no set A^i_τ (i ∈ colors, τ ⊆ σ) contains."""

    point: RatPoint
    colors: tuple[int, ...]
    support: int

    def recheck(self, oracle: CoverOracle, polytope: PolytopeModel) -> bool:
        """True when the violation still holds under direct oracle queries."""
        if polytope.support(self.point) != self.support:
            return False
        return not any(
            oracle.query(i, tau, self.point) for i in self.colors for tau in polytope.faces_within(self.support)
        )


def sample_face_point(polytope: PolytopeModel, face_id: int, rng: np.random.Generator) -> RatPoint:
    """Random point of the relative interior of a face (or of P) with dyadic weights."""
    vertex_ids = polytope.face_vertices(face_id)
    raw = rng.integers(1, 17, size=len(vertex_ids))
    weights = [Fraction(int(w), 16) for w in raw]
    total = sum(weights, Fraction(0))
    dim = polytope.ambient_dim
    coords = [Fraction(0)] * dim
    for w, v in zip(weights, vertex_ids):
        pt = polytope.vertices[v]
        for axis in range(dim):
            coords[axis] += w * pt[axis]
    return RatPoint(tuple(c / total for c in coords))


def falsify_weak_cover(
    oracle: CoverOracle,
    polytope: PolytopeModel,
    m: int,
    samples: int,
    seed: int,
) -> ViolationCertificate | None:
    """Searches for a point violating the m-weak Komiya condition.

    Args:
        oracle (CoverOracle): Cover under test.
        polytope (PolytopeModel): Polytope the cover lives on.
        m (int): Weakness parameter; every (n-m+1)-subset of colours is tested.
        samples (int): Points drawn per face (and for P itself).
        seed (int): Seed for the NumPy generator; results are deterministic.

    Returns:
        ViolationCertificate | None: The first violation found. None is not a
        proof that the cover is valid.
    """
    if m > oracle.n:
        raise ValueError(f"m={m} exceeds the number of colours n={oracle.n}")
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    rng = np.random.default_rng(seed)
    subsets = list(itertools.combinations(range(1, oracle.n + 1), oracle.n - m + 1))
    face_ids = [face.id for face in polytope.faces] + [WHOLE_POLYTOPE]
    for face_id in face_ids:
        within = polytope.faces_within(face_id)
        for _ in range(samples):
            x = sample_face_point(polytope, face_id, rng)
            # Colours that cover x; a subset fails iff it avoids all of them.
            covering = {i for i in range(1, oracle.n + 1) if any(oracle.query(i, tau, x) for tau in within)}
            for subset in subsets:
                if covering.isdisjoint(subset):
                    logger.info("Cover violation at %r for colours %s", x, subset)
                    return ViolationCertificate(x, subset, face_id)
    return None
