"""Sampled wave field data models"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from resource_classes import ConfigurationError
from .base import BaseModel
from .physics import Wavelength


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TransverseGrid(BaseModel):
    """Periodic 1-D grid; sample j sits at x_j = (j - n/2)·spacing."""

    window: float
    n: int

    UNIT_SUFFIX_MAP = {"window": "_m"}

    def __post_init__(self) -> None:
        if self.window <= 0:
            raise ConfigurationError(f"Grid window must be positive, got {self.window}")
        if self.n < 1024 or self.n & (self.n - 1):
            raise ConfigurationError(
                f"Grid sample count must be a power of two >= 1024, got {self.n}"
            )

    @property
    def spacing(self) -> float:
        return self.window / self.n

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.spacing

    @property
    def frequencies(self) -> np.ndarray:
        """Signed spatial frequencies in FFT (wrap-around) order."""
        return np.fft.fftfreq(self.n, d=self.spacing)


@dataclass(frozen=True, eq=False)
class WaveField(BaseModel):
    """Complex amplitudes on a grid at plane `z` (intensity = |amplitude|²)."""

    grid: TransverseGrid
    amplitudes: np.ndarray
    wavelength: Wavelength
    z: float = 0.0

    def __post_init__(self) -> None:
        amplitudes = _frozen_array(self.amplitudes, complex)
        if amplitudes.shape != (self.grid.n,):
            raise ConfigurationError(
                f"Field has {amplitudes.size} samples but the grid has {self.grid.n}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def flux(self) -> float:
        return float(np.sum(self.intensity) * self.grid.spacing)

    def replace(self, amplitudes: np.ndarray, z: Optional[float] = None) -> "WaveField":
        return WaveField(
            grid=self.grid,
            amplitudes=amplitudes,
            wavelength=self.wavelength,
            z=self.z if z is None else z,
        )


@dataclass(frozen=True, eq=False)
class FarFieldFrame(BaseModel):
    """Detector-plane intensity; `total` = Σ intensity·pitch."""

    coordinates: np.ndarray
    intensity: np.ndarray
    shift: Optional[float] = None
    total: float = field(init=False)

    def __post_init__(self) -> None:
        coordinates = _frozen_array(self.coordinates, float)
        intensity = _frozen_array(self.intensity, float)
        if coordinates.shape != intensity.shape or coordinates.ndim != 1:
            raise ConfigurationError("Frame coordinates and intensity must match")
        if coordinates.size < 2:
            raise ConfigurationError("A frame needs at least two detector positions")
        object.__setattr__(self, "coordinates", coordinates)
        object.__setattr__(self, "intensity", intensity)
        object.__setattr__(self, "total", float(np.sum(intensity) * self.pitch))

    @property
    def pitch(self) -> float:
        return float(self.coordinates[1] - self.coordinates[0])

    def normalized(self) -> np.ndarray:
        """Intensity scaled to unit integral."""
        if self.total <= 0:
            return np.zeros_like(self.intensity)
        return self.intensity / self.total

    def rebin(self, pixel: float) -> "FarFieldFrame":
        """Average onto detector pixels centred on multiples of `pixel`; the integral is kept."""
        if pixel <= self.pitch * (1.0 + 1e-9):
            return self
        index = np.floor(self.coordinates / pixel + 0.5).astype(np.int64)
        first = index.min()
        summed = np.bincount(index - first, weights=self.intensity * self.pitch)
        centres = (first + np.arange(summed.size)) * pixel
        return FarFieldFrame(coordinates=centres, intensity=summed / pixel, shift=self.shift)

    def window(self, low: float, high: float) -> "FarFieldFrame":
        keep = (self.coordinates >= low) & (self.coordinates <= high)
        return FarFieldFrame(
            coordinates=self.coordinates[keep], intensity=self.intensity[keep], shift=self.shift
        )
