"""Pydantic models for every JSON input and the CLI run configuration.

Rationals are accepted as integers, ``"a/b"`` strings or ``[num, den]``
pairs and validated into `fractions.Fraction`; floats are rejected. Each
input model has a ``build`` method producing the domain objects.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from src.cake import HungryMaxPlayer, PlayerOracle
from src.cover import ArgmaxCover, CoverOracle, EmptyCover, NearestVertexCover
from src.d_interval import PiercingInstance, Variant
from src.exact_math import RatPoint, as_rat
from src.hypergraph import Hypergraph
from src.polytope import AnchorTable, PolytopeModel, general_polytope, product_of_simplices, simplex


def _to_fraction(value: Any) -> Fraction:
    try:
        return as_rat(value)
    except TypeError as e:
        # pydantic reports ValueErrors as validation errors
        raise ValueError(str(e)) from e


Rational = Annotated[Fraction, BeforeValidator(_to_fraction)]


class _Input(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")


# --- Polytopes, covers and anchors ---


class PolytopeSpec(_Input):
    kind: Literal["simplex", "product", "general"]
    k: Optional[int] = None
    sizes: Optional[List[int]] = None
    m: Optional[int] = None
    d: Optional[int] = None
    vertices: Optional[List[List[Rational]]] = None
    faces: Optional[List[List[int]]] = None
    triangulation: Optional[List[List[int]]] = None
    reference_point: Optional[List[Rational]] = None

    @model_validator(mode="after")
    def _check_kind(self) -> PolytopeSpec:
        if self.kind == "simplex" and self.k is None:
            raise ValueError("A simplex needs k")
        if self.kind == "product" and self.sizes is None and (self.m is None or self.d is None):
            raise ValueError("A product needs sizes or both m and d")
        if self.kind == "general" and (self.vertices is None or self.faces is None or self.triangulation is None):
            raise ValueError("A general polytope needs vertices, faces and triangulation")
        if self.kind != "general" and self.reference_point is not None:
            raise ValueError("reference_point is only configurable for general polytopes")
        return self

    def build(self) -> PolytopeModel:
        if self.kind == "simplex":
            assert self.k is not None
            return simplex(self.k)
        if self.kind == "product":
            if self.sizes is not None:
                return product_of_simplices(self.sizes)
            assert self.m is not None and self.d is not None
            return product_of_simplices([self.m] * self.d)
        assert self.vertices is not None and self.faces is not None and self.triangulation is not None
        p = RatPoint(tuple(self.reference_point)) if self.reference_point is not None else None
        return general_polytope([RatPoint(tuple(v)) for v in self.vertices], self.faces, self.triangulation, p)


class CoverSpec(_Input):
    type: Literal["argmax", "nearest_vertex", "empty"]
    n: int = Field(ge=1)
    weights: Optional[Dict[int, List[Rational]]] = None
    empty_colors: List[int] = Field(default_factory=list)

    def build(self, polytope: PolytopeModel) -> CoverOracle:
        if self.type == "argmax":
            return ArgmaxCover(polytope, self.n, self.weights, self.empty_colors)
        if self.type == "nearest_vertex":
            return NearestVertexCover(polytope, self.n, self.empty_colors)
        return EmptyCover(self.n)


class AnchorSpec(_Input):
    color: int = Field(ge=1)
    face: List[int]
    point: List[Rational]


class SolveInput(_Input):
    polytope: PolytopeSpec
    cover: CoverSpec
    anchors: List[AnchorSpec] = Field(default_factory=list)

    def build_anchors(self, polytope: PolytopeModel) -> AnchorTable:
        overrides = {}
        for spec in self.anchors:
            face_id = polytope.face_id_of(spec.face)
            if face_id is None:
                raise ValueError(f"Anchor face {spec.face} is not a proper face of the polytope")
            overrides[(spec.color, face_id)] = RatPoint(tuple(spec.point))
        return AnchorTable(polytope, self.cover.n, overrides)


# --- d-intervals, players, hypergraphs ---


class PiercingInput(_Input):
    variant: Variant
    d: int = Field(ge=1)
    k: Optional[int] = None
    m: Optional[int] = None
    families: List[List[List[tuple[Rational, Rational]]]]

    def build(self) -> PiercingInstance:
        return PiercingInstance.build(self.variant, self.d, self.families, k=self.k, m=self.m)


class PlayerSpec(_Input):
    model: Literal["hungry_max"] = "hungry_max"
    densities: List[List[tuple[Rational, Rational, Rational]]]


class PlayersInput(_Input):
    m: int = Field(ge=2)
    d: int = Field(ge=1)
    players: List[PlayerSpec]

    @model_validator(mode="after")
    def _check_cakes(self) -> PlayersInput:
        for idx, player in enumerate(self.players, start=1):
            if len(player.densities) != self.d:
                raise ValueError(f"Player {idx} has densities for {len(player.densities)} cakes, expected {self.d}")
        return self

    def build(self) -> List[PlayerOracle]:
        return [HungryMaxPlayer(player.densities) for player in self.players]


class HypergraphInput(_Input):
    vertices: int = Field(ge=0)
    edges: List[List[int]]
    parts: Optional[List[List[int]]] = None
    d: Optional[int] = Field(default=None, ge=1)

    def build(self) -> Hypergraph:
        return Hypergraph.of(self.vertices, self.edges, self.parts)


# --- Run configuration ---


class RunConfig(_Input):
    command: Literal["solve-kkm", "pierce", "divide", "hypergraph", "check-cover"]
    input: Path
    eps: Optional[Rational] = None
    seed: int = 0
    out: Optional[Path] = None
    trace: bool = False
    samples: Optional[int] = Field(default=None, ge=1)
    weak_m: Optional[int] = Field(default=None, ge=1)
    skip_hypothesis: bool = False
    no_hypothesis_cap: bool = False

    @field_validator("eps")
    @classmethod
    def _positive_eps(cls, value: Optional[Fraction]) -> Optional[Fraction]:
        if value is not None and value <= 0:
            raise ValueError(f"eps must be positive, got {value}")
        return value
