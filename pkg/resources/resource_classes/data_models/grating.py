"""Grating data models"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from resource_classes import DomainError
from ..constants import NM
from .base import BaseModel


@dataclass(frozen=True)
class SlitPhaseModel(BaseModel):
    """One-wall image-charge phase φ(ξ) = min(beta / (w/2 - ξ), phi_max)."""

    beta: float = 0.0  # rad·m
    phi_max: float = 4.0 * math.pi
    enabled: bool = False

    UNIT_SUFFIX_MAP = {"beta": "_rad_m", "phi_max": "_rad"}

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise DomainError(f"Slit phase strength must be >= 0, got {self.beta}")
        if self.phi_max <= 0:
            raise DomainError(f"Phase clamp must be > 0, got {self.phi_max}")

    @classmethod
    def from_strength(cls, beta: float, phi_max: float = 4.0 * math.pi) -> "SlitPhaseModel":
        """Enabled whenever the strength is non-zero."""
        return cls(beta=beta, phi_max=phi_max, enabled=beta > 0)


@dataclass(frozen=True)
class GratingSpec(BaseModel):
    """Geometry of one nanograting. Thickness is recorded, the thin-mask model ignores it."""

    period: float = 100.0 * NM
    open_width: float = 50.0 * NM
    thickness: float = 150.0 * NM
    phase: SlitPhaseModel = field(default_factory=SlitPhaseModel)
    lateral_offset: float = 0.0

    UNIT_SUFFIX_MAP = {
        "period": "_m",
        "open_width": "_m",
        "thickness": "_m",
        "lateral_offset": "_m",
    }

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise DomainError(f"Grating period must be positive, got {self.period}")
        if not 0 < self.open_width < self.period:
            raise DomainError(
                f"Open width {self.open_width} must lie strictly inside (0, {self.period})"
            )

    @property
    def open_fraction(self) -> float:
        return self.open_width / self.period

    def shifted(self, lateral_offset: float) -> "GratingSpec":
        return replace(self, lateral_offset=lateral_offset)

    def ideal(self) -> "GratingSpec":
        """Same geometry with the slit phase switched off."""
        return replace(self, phase=replace(self.phase, enabled=False))
