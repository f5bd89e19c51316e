"""Beam data models"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

from resource_classes import ConfigurationError, DomainError
from ..constants import UM
from .base import BaseModel
from .wavefield import WaveField


@dataclass(frozen=True)
class GSMBeam(BaseModel):
    """
    Gaussian Schell-model beam at G1.

    `radius` follows the curvature convention of the propagation service:
    positive is converging, negative diverging, infinite collimated.
    """

    width: float = 150.0 * UM
    coherence_width: float = 2.0 * UM
    radius: float = math.inf
    center: float = 0.0

    UNIT_SUFFIX_MAP = {
        "width": "_m",
        "coherence_width": "_m",
        "radius": "_m",
        "center": "_m",
    }

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise DomainError(f"Beam width must be positive, got {self.width}")
        if self.coherence_width <= 0:
            raise DomainError(
                f"Coherence width must be positive, got {self.coherence_width}"
            )
        if self.radius == 0:
            raise DomainError("Radius of curvature 0 is not a wavefront")

    @property
    def collimated(self) -> bool:
        return math.isinf(self.radius)

    def with_radius(self, radius: float) -> "GSMBeam":
        return replace(self, radius=radius)


@dataclass(frozen=True, eq=False)
class Ensemble(BaseModel):
    """Incoherent mixture of coherent members, `(weight, field)` pairs."""

    members: List[Tuple[float, WaveField]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.members:
            raise ConfigurationError("An ensemble needs at least one member")
        weights = [weight for weight, _ in self.members]
        if min(weights) < 0:
            raise ConfigurationError("Ensemble weights must be non-negative")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise ConfigurationError(f"Ensemble weights sum to {math.fsum(weights)}, not 1")
        grid, wavelength = self.members[0][1].grid, self.members[0][1].wavelength
        for _, member in self.members[1:]:
            if member.grid != grid or member.wavelength != wavelength:
                raise ConfigurationError("Ensemble members must share grid and wavelength")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def weights(self) -> List[float]:
        return [weight for weight, _ in self.members]

    @property
    def fields(self) -> List[WaveField]:
        return [member for _, member in self.members]
