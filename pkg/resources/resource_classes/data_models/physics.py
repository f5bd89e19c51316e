"""Physics data models: beam energy, wavelength and the setup geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from resource_classes import ConfigurationError, DomainError
from ..constants import KEV, MM, NM, PM, UM
from .base import BaseModel


@dataclass(frozen=True)
class BeamEnergy(BaseModel):
    """Kinetic energy of the electrons, in keV."""

    kinetic_energy: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.kinetic_energy) or self.kinetic_energy <= 0:
            raise DomainError(
                f"Kinetic energy must be positive, got {self.kinetic_energy} keV"
            )

    @property
    def joules(self) -> float:
        return self.kinetic_energy * KEV


@dataclass(frozen=True)
class Wavelength(BaseModel):
    """de Broglie wavelength. Stored in metres, reported in picometres."""

    metres: float

    UNIT_SUFFIX_MAP = {"metres": "_m"}

    def __post_init__(self) -> None:
        if not math.isfinite(self.metres) or self.metres <= 0:
            raise DomainError(f"Wavelength must be positive, got {self.metres} m")

    @classmethod
    def from_picometres(cls, picometres: float) -> "Wavelength":
        return cls(metres=picometres * PM)

    @property
    def picometres(self) -> float:
        return self.metres / PM

    @property
    def wavenumber(self) -> float:
        """k = 2π/λ in rad/m."""
        return 2.0 * np.pi / self.metres


@dataclass(frozen=True)
class SetupGeometry(BaseModel):
    """Positions along the optical axis: G1 at 0, G2 at `z_sep`, detector `z_det` after G2."""

    z_sep: float
    z_det: float = 1.0
    z_g1: float = 0.0

    UNIT_SUFFIX_MAP = {"z_sep": "_m", "z_det": "_m", "z_g1": "_m"}

    def __post_init__(self) -> None:
        if self.z_g1 != 0.0:
            raise ConfigurationError("G1 defines the origin, z_g1 must be 0")
        if self.z_sep <= 0 or self.z_det <= 0:
            raise ConfigurationError(
                f"Separations must be positive (z_sep={self.z_sep}, z_det={self.z_det})"
            )
        if self.z_det < 100.0 * self.z_sep:
            raise ConfigurationError(
                f"Detector at {self.z_det} m is not far from the gratings "
                f"(needs z_det >= 100 z_sep = {100.0 * self.z_sep} m)"
            )


@dataclass(frozen=True)
class ScanSpec(BaseModel):
    """Grating-separation rows and G2 lateral-shift columns of a carpet scan."""

    z_min: float = 0.1 * MM
    z_max: float = 1.7 * MM
    z_step: float = 30.0 * UM
    x_step: float = 2.5 * NM
    x_count: int = 96

    UNIT_SUFFIX_MAP = {"z_min": "_m", "z_max": "_m", "z_step": "_m", "x_step": "_m"}

    def __post_init__(self) -> None:
        if not self.z_min < self.z_max:
            raise ConfigurationError(
                f"Scan needs z_min < z_max (got {self.z_min}, {self.z_max})"
            )
        if self.z_min <= 0:
            raise ConfigurationError("Scan must start behind G1 (z_min > 0)")
        if self.z_step <= 0 or self.x_step <= 0:
            raise ConfigurationError("Scan steps must be positive")
        if self.x_count < 2:
            raise ConfigurationError("A carpet row needs at least 2 shifts")

    def z_values(self) -> np.ndarray:
        count = int(math.floor((self.z_max - self.z_min) / self.z_step + 1e-9)) + 1
        return self.z_min + self.z_step * np.arange(count)

    def x_values(self) -> np.ndarray:
        return self.x_step * np.arange(self.x_count)
