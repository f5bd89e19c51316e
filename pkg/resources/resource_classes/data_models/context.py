"""Simulation context: the numerical settings shared by every scan point"""

from __future__ import annotations

from dataclasses import dataclass, replace

from resource_classes import ConfigurationError
from ..constants import UM
from .base import BaseModel
from .config import PRESETS
from .physics import Wavelength
from .wavefield import TransverseGrid


@dataclass(frozen=True)
class SimulationContext(BaseModel):
    """Grid, wavelength, ensemble size and worker count for one run."""

    grid: TransverseGrid
    wavelength: Wavelength
    members: int = 15
    threads: int = 1
    show_progress: bool = False

    def __post_init__(self) -> None:
        if self.members < 1 or self.members % 2 == 0:
            raise ConfigurationError(f"Ensemble size must be odd and >= 1, got {self.members}")
        if self.threads < 1:
            raise ConfigurationError(f"Thread count must be >= 1, got {self.threads}")

    @classmethod
    def from_preset(
        cls, name: str, wavelength: Wavelength, threads: int = 1
    ) -> "SimulationContext":
        try:
            preset = PRESETS[name]
        except KeyError:
            raise ConfigurationError(f"Unknown preset '{name}'") from None
        grid = TransverseGrid(
            window=preset["grid"]["window_um"] * UM, n=preset["grid"]["n"]
        )
        return cls(
            grid=grid,
            wavelength=wavelength,
            members=preset["ensemble"]["m"],
            threads=threads,
        )

    def coherent(self) -> "SimulationContext":
        """Single-member (fully coherent) variant of this context."""
        return replace(self, members=1)
