"""Exceptions and the boolean-with-witness result type."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional


class GkmError(Exception):
    """Base class; carries an optional JSON-able witness payload."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class GraphFormatError(GkmError):
    """Malformed interchange data (bad types, unknown fields, bad rationals)."""


class AmbiguousConnection(GkmError):
    """More than one admissible connection image for an edge."""


class NoCandidate(GkmError):
    """No admissible connection image for an edge."""


class SpanViolation(GkmError):
    """Face closure left the expected valence."""


class PartitionInconsistent(GkmError):
    """Triangle/biangle relation at a vertex is not an equivalence."""


class WellDefinednessFailure(GkmError):
    """Covering construction reached a vertex along two incompatible paths."""


class NotGalois(GkmError):
    """Deck transformations do not act simply transitively on a fiber."""


class NotFree(GkmError):
    """Group action fixes a vertex."""


class NotCompatible(GkmError):
    """Group action does not preserve labels or connection."""


class InconsistentHolonomy(GkmError):
    """Extension transport disagrees around a cycle."""


class ActionNotCompatible(GkmError):
    """Induced weight action fails sign resolution, lattice or homomorphism checks."""


class FormalityViolation(GkmError):
    """Betti recursion produced negative numbers or the wrong total."""


class NoSuchClass(GkmError):
    """Requested cohomology class does not exist or is not unique."""


class DependentLabels(GkmError):
    """Characteristic pair has dependent labels at a vertex."""


class NotProductOfSimplices(GkmError):
    """Operation requires a product of simplices."""


class PipelineError(GkmError):
    """A pipeline stage failed; records which one."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__("stage %r failed: %s" % (stage, cause), getattr(cause, "witness", None))
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class Verdict:
    """Boolean check outcome with an optional witness for failures."""

    ok: bool
    witness: Optional[Any] = None

    def __bool__(self) -> bool:
        return self.ok
