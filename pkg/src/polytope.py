"""Polytopes with an explicit face lattice.

Handles:
- `PolytopeModel`: vertex coordinates, the proper faces F(P) in a fixed order
  (dimension, then lexicographic vertex set), and the reference point p.
- Built-in constructors for the standard simplex and products of simplices.
- `support(P, v)`: the minimal face containing a point.
- `AnchorTable`: the points y^i_τ ∈ τ, defaulting to face barycenters.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Final, Iterable, Mapping, Sequence

from src.exact_math import RatPoint, affine_rank, centroid, in_convex_hull

logger = logging.getLogger(__name__)

# Support of a point in the relative interior of P itself.
WHOLE_POLYTOPE: Final[int] = -1


@dataclass(frozen=True)
class FaceRecord:
    id: int
    vertex_ids: tuple[int, ...]
    dim: int


class PolytopeModel:
    """A (k-1)-dimensional polytope given by vertices and its proper faces.

    `kind` is ``"simplex"``, ``"product"`` or ``"general"``. Simplices and
    products of simplices answer support and membership queries from their
    coordinates; general polytopes fall back to exact hull membership per face.
    """

    def __init__(
        self,
        vertices: Sequence[RatPoint],
        faces: Iterable[Sequence[int]],
        *,
        reference_point: RatPoint | None = None,
        kind: str = "general",
        factor_sizes: Sequence[int] | None = None,
        vertex_labels: Sequence[tuple[int, ...]] | None = None,
        triangulation: Sequence[Sequence[int]] | None = None,
        face_dims: Mapping[tuple[int, ...], int] | None = None,
    ) -> None:
        if not vertices:
            raise ValueError("A polytope needs at least one vertex")
        ambient = vertices[0].dim
        if any(v.dim != ambient for v in vertices):
            raise ValueError("All polytope vertices must share one ambient dimension")
        if kind not in ("simplex", "product", "general"):
            raise ValueError(f"Unknown polytope kind {kind!r}")

        self._vertices = tuple(vertices)
        self._kind = kind
        self._factor_sizes = tuple(factor_sizes) if factor_sizes is not None else None
        self._vertex_labels = tuple(vertex_labels) if vertex_labels is not None else None
        self._dim = affine_rank(self._vertices)

        records: dict[tuple[int, ...], int] = {}
        for raw in faces:
            ids = tuple(sorted(set(raw)))
            if not ids:
                raise ValueError("Faces must be nonempty")
            if ids[0] < 0 or ids[-1] >= len(self._vertices):
                raise ValueError(f"Face {list(ids)} references an unknown vertex")
            if ids in records:
                continue
            if face_dims is not None and ids in face_dims:
                dim = face_dims[ids]
            else:
                dim = affine_rank([self._vertices[i] for i in ids])
            if dim >= self._dim:
                raise ValueError(f"Face {list(ids)} has dimension {dim}, not a proper face of a {self._dim}-polytope")
            records[ids] = dim

        ordered = sorted(records.items(), key=lambda item: (item[1], item[0]))
        self._faces = tuple(FaceRecord(i, ids, dim) for i, (ids, dim) in enumerate(ordered))
        self._face_by_vertices = {face.vertex_ids: face.id for face in self._faces}
        vertex_sets = [frozenset(face.vertex_ids) for face in self._faces]
        self._subfaces: dict[int, tuple[int, ...]] = {
            face.id: tuple(g.id for g in self._faces if vertex_sets[g.id] <= vertex_sets[face.id])
            for face in self._faces
        }
        self._subfaces[WHOLE_POLYTOPE] = tuple(face.id for face in self._faces)

        self._triangulation = tuple(tuple(sorted(s)) for s in triangulation) if triangulation is not None else None

        p = reference_point if reference_point is not None else centroid(self._vertices)
        if p.dim != ambient:
            raise ValueError(f"Reference point has dimension {p.dim}, polytope lives in R^{ambient}")
        if not self.contains(p):
            raise ValueError(f"Reference point {p!r} lies outside the polytope")
        self._p = p

    # --- Accessors ---

    @property
    def vertices(self) -> tuple[RatPoint, ...]:
        return self._vertices

    @property
    def faces(self) -> tuple[FaceRecord, ...]:
        return self._faces

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def k(self) -> int:
        """Number of vertices of a maximal simplex in a triangulation (dim + 1)."""
        return self._dim + 1

    @property
    def ambient_dim(self) -> int:
        return self._vertices[0].dim

    @property
    def reference_point(self) -> RatPoint:
        return self._p

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def factor_sizes(self) -> tuple[int, ...] | None:
        return self._factor_sizes

    @property
    def vertex_labels(self) -> tuple[tuple[int, ...], ...] | None:
        """1-based piece tuples (j_1, ..., j_d) for product vertices."""
        return self._vertex_labels

    @property
    def triangulation_hint(self) -> tuple[tuple[int, ...], ...] | None:
        return self._triangulation

    def face(self, face_id: int) -> FaceRecord:
        return self._faces[face_id]

    def face_id_of(self, vertex_ids: Iterable[int]) -> int | None:
        return self._face_by_vertices.get(tuple(sorted(vertex_ids)))

    def face_vertices(self, face_id: int) -> tuple[int, ...]:
        if face_id == WHOLE_POLYTOPE:
            return tuple(range(len(self._vertices)))
        return self._faces[face_id].vertex_ids

    def face_points(self, face_id: int) -> list[RatPoint]:
        return [self._vertices[i] for i in self.face_vertices(face_id)]

    def faces_within(self, support_id: int) -> tuple[int, ...]:
        """Faces τ ⊆ σ in the fixed face order (σ = WHOLE_POLYTOPE gives all of F(P))."""
        return self._subfaces[support_id]

    def is_subface(self, face_id: int, support_id: int) -> bool:
        return face_id in self._subfaces[support_id]

    # --- Membership and support ---

    def _blocks(self, x: RatPoint) -> list[tuple[Fraction, ...]]:
        assert self._factor_sizes is not None
        blocks = []
        start = 0
        for size in self._factor_sizes:
            blocks.append(x.coords[start : start + size])
            start += size
        return blocks

    def contains(self, x: RatPoint) -> bool:
        """Exact membership test x ∈ P."""
        if x.dim != self.ambient_dim:
            return False
        if self._factor_sizes is not None:
            return all(all(c >= 0 for c in block) and sum(block) == 1 for block in self._blocks(x))
        return in_convex_hull(x, self._vertices) is not None

    def support(self, x: RatPoint) -> int:
        """Minimal face containing x, or WHOLE_POLYTOPE for relative-interior points.

        Raises:
            ValueError: If x lies outside P.
        """
        if not self.contains(x):
            raise ValueError(f"Point {x!r} lies outside the polytope")
        if self._factor_sizes is not None:
            positive = [tuple(j for j, c in enumerate(block) if c > 0) for block in self._blocks(x)]
            if all(len(pos) == size for pos, size in zip(positive, self._factor_sizes)):
                return WHOLE_POLYTOPE
            ids = tuple(self._vertex_index(label) for label in itertools.product(*positive))
            face_id = self._face_by_vertices.get(ids)
            if face_id is None:
                raise ValueError(f"No face with vertex set {list(ids)}")
            return face_id
        for face in self._faces:
            if in_convex_hull(x, self.face_points(face.id)) is not None:
                return face.id
        return WHOLE_POLYTOPE

    def _vertex_index(self, label: Sequence[int]) -> int:
        assert self._factor_sizes is not None
        index = 0
        for j, size in zip(label, self._factor_sizes):
            index = index * size + j
        return index

    def check_lattice(self) -> None:
        """Checks that pairwise intersections of face vertex sets are faces (or empty).

        Raises:
            ValueError: Naming the first pair whose intersection is missing.
        """
        for a, b in itertools.combinations(self._faces, 2):
            common = tuple(sorted(set(a.vertex_ids) & set(b.vertex_ids)))
            if common and common not in self._face_by_vertices:
                raise ValueError(
                    f"Faces {list(a.vertex_ids)} and {list(b.vertex_ids)} meet in {list(common)}, which is not a face"
                )

    def __repr__(self) -> str:
        return f"PolytopeModel(kind={self._kind!r}, dim={self._dim}, vertices={len(self._vertices)}, faces={len(self._faces)})"


def support(P: PolytopeModel, v: RatPoint) -> int:
    """Minimal face of P containing v (WHOLE_POLYTOPE for interior points)."""
    return P.support(v)


# --- Built-in constructors ---


def product_of_simplices(sizes: Sequence[int]) -> PolytopeModel:
    """Δ^{m_1-1} × ... × Δ^{m_d-1} embedded in R^{m_1+...+m_d}.

    Vertices are indexed by tuples (j_1, ..., j_d) in lexicographic order;
    proper faces are products S_1 × ... × S_d of nonempty index sets that are
    not all full.
    """
    sizes = tuple(sizes)
    if not sizes or any(m < 2 for m in sizes):
        raise ValueError(f"Every factor needs at least 2 vertices, got sizes {list(sizes)}")
    total = sum(sizes)
    offsets = [sum(sizes[:t]) for t in range(len(sizes))]

    labels = list(itertools.product(*(range(m) for m in sizes)))
    vertices = []
    for label in labels:
        coords = [Fraction(0)] * total
        for t, j in enumerate(label):
            coords[offsets[t] + j] = Fraction(1)
        vertices.append(RatPoint(tuple(coords)))

    def index(label: Sequence[int]) -> int:
        idx = 0
        for j, size in zip(label, sizes):
            idx = idx * size + j
        return idx

    factor_subsets = [
        [s for r in range(1, m + 1) for s in itertools.combinations(range(m), r)] for m in sizes
    ]
    faces: list[tuple[int, ...]] = []
    dims: dict[tuple[int, ...], int] = {}
    for choice in itertools.product(*factor_subsets):
        if all(len(s) == m for s, m in zip(choice, sizes)):
            continue
        ids = tuple(sorted(index(label) for label in itertools.product(*choice)))
        faces.append(ids)
        dims[ids] = sum(len(s) - 1 for s in choice)

    kind = "simplex" if len(sizes) == 1 else "product"
    return PolytopeModel(
        vertices,
        faces,
        kind=kind,
        factor_sizes=sizes,
        vertex_labels=[tuple(j + 1 for j in label) for label in labels],
        face_dims=dims,
    )


def simplex(k: int) -> PolytopeModel:
    """Standard simplex Δ^{k-1} = conv{e_1, ..., e_k} with p at the barycenter."""
    if k < 2:
        raise ValueError(f"simplex needs k >= 2, got {k}")
    return product_of_simplices([k])


def simplex_product(m: int, d: int) -> PolytopeModel:
    """(Δ^{m-1})^d with p = b(P)."""
    if m < 2 or d < 1:
        raise ValueError(f"simplex_product needs m >= 2 and d >= 1, got m={m}, d={d}")
    return product_of_simplices([m] * d)


def general_polytope(
    vertices: Sequence[RatPoint],
    faces: Sequence[Sequence[int]],
    triangulation: Sequence[Sequence[int]],
    reference_point: RatPoint | None = None,
) -> PolytopeModel:
    """User-supplied polytope; the face list must be the full set of proper faces."""
    model = PolytopeModel(vertices, faces, reference_point=reference_point, triangulation=triangulation)
    model.check_lattice()
    logger.info("Loaded general polytope: %r", model)
    return model


# --- Anchors ---


class AnchorTable:
    """Anchor points y[i][τ] ∈ τ; barycenters unless overridden per (colour, face)."""

    def __init__(
        self,
        polytope: PolytopeModel,
        n: int | None = None,
        overrides: Mapping[tuple[int, int], RatPoint] | None = None,
    ) -> None:
        self._polytope = polytope
        self._n = n
        self._base = {face.id: centroid(polytope.face_points(face.id)) for face in polytope.faces}
        self._overrides: dict[tuple[int, int], RatPoint] = {}
        for (color, face_id), point in (overrides or {}).items():
            self._admit(color, face_id, point)
            self._overrides[(color, face_id)] = point

    def _admit(self, color: int, face_id: int, point: RatPoint) -> None:
        if self._n is not None and not 1 <= color <= self._n:
            raise ValueError(f"Anchor colour {color} outside [1, {self._n}]")
        if not 0 <= face_id < len(self._polytope.faces):
            raise ValueError(f"Anchor face id {face_id} does not exist")
        if in_convex_hull(point, self._polytope.face_points(face_id)) is None:
            face = self._polytope.face(face_id)
            raise ValueError(f"Anchor {point!r} for colour {color} is not in face {list(face.vertex_ids)}")

    @property
    def n(self) -> int | None:
        return self._n

    @property
    def polytope(self) -> PolytopeModel:
        return self._polytope

    def get(self, color: int, face_id: int) -> RatPoint:
        return self._overrides.get((color, face_id), self._base[face_id])

    def with_override(self, color: int, face_id: int, point: RatPoint) -> AnchorTable:
        merged = dict(self._overrides)
        merged[(color, face_id)] = point
        return AnchorTable(self._polytope, self._n, merged)


def default_anchors(P: PolytopeModel, n: int | None = None) -> AnchorTable:
    """y[i][τ] = barycenter of τ for every colour i."""
    return AnchorTable(P, n)
