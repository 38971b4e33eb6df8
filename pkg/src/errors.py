"""Exception hierarchy shared by the solver pipelines.

Precondition failures (bad dimensions, eps <= 0, caps exceeded) are plain
`ValueError`s; the classes here mark outcomes the CLI maps to exit codes.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Sequence

if TYPE_CHECKING:
    from src.cover import ViolationCertificate


class KKMError(Exception):
    """Base class for solver errors."""


class CoverViolation(KKMError):
    """No admissible label exists at some point: the cover hypothesis fails there."""

    def __init__(self, certificate: ViolationCertificate, message: str | None = None) -> None:
        self.certificate = certificate
        super().__init__(message or f"Cover hypothesis violated at {certificate.point!r} for colors {certificate.colors}")


class HypothesisViolation(KKMError):
    """A piercing-number hypothesis failed for the colour subset `colors`."""

    def __init__(self, colors: Sequence[int], cover: Sequence[Any], required: int) -> None:
        self.colors = tuple(colors)
        self.cover = tuple(cover)
        self.required = required
        super().__init__(
            f"Families {self.colors} can be pierced by {len(self.cover)} points, fewer than the required {required}"
        )


class InternalError(KKMError):
    """An algorithmic contract was broken; indicates a bug or an invalid input model."""


class IterationCapExceeded(InternalError):
    """A refinement or elimination loop ran past its configured cap."""
