"""Result data models: transmission curves, carpets and curvature fits"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from resource_classes import ConfigurationError
from .base import BaseModel


def _modulation(values: np.ndarray) -> np.ndarray:
    """(max - min) / max along the last axis, 0 for all-dark rows."""
    top = values.max(axis=-1)
    bottom = values.min(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        contrast = np.where(top > 0, (top - bottom) / np.where(top > 0, top, 1.0), 0.0)
    return contrast


@dataclass(frozen=True, eq=False)
class TransmissionCurve(BaseModel):
    """Moiré scan: normalized flux per G2 shift."""

    shifts: np.ndarray
    flux: np.ndarray
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        shifts = np.asarray(self.shifts, dtype=float)
        flux = np.asarray(self.flux, dtype=float)
        if shifts.shape != flux.shape or shifts.size < 2:
            raise ConfigurationError("A transmission curve needs >= 2 matching points")
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "flux", flux)

    @property
    def contrast(self) -> float:
        return float(_modulation(self.flux))

    @property
    def peak_shift(self) -> float:
        return float(self.shifts[int(np.argmax(self.flux))])

    @property
    def valley_shift(self) -> float:
        return float(self.shifts[int(np.argmin(self.flux))])


@dataclass(frozen=True, eq=False)
class CarpetImage(BaseModel):
    """
    Flux after G2 over (G1-G2 separation, G2 shift).

    Rows follow `z_values`, columns follow `x_values`. Alignment fills
    `applied_shifts` (whole samples per row) and `flagged_rows`.
    """

    z_values: np.ndarray
    x_values: np.ndarray
    flux: np.ndarray
    metadata: Dict[str, str] = field(default_factory=dict)
    applied_shifts: Optional[List[int]] = None
    flagged_rows: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        z_values = np.asarray(self.z_values, dtype=float)
        x_values = np.asarray(self.x_values, dtype=float)
        flux = np.asarray(self.flux, dtype=float)
        if flux.shape != (z_values.size, x_values.size):
            raise ConfigurationError(
                f"Carpet of shape {flux.shape} does not match axes "
                f"({z_values.size}, {x_values.size})"
            )
        if np.any(flux < 0):
            raise ConfigurationError("Carpet flux must be non-negative")
        object.__setattr__(self, "z_values", z_values)
        object.__setattr__(self, "x_values", x_values)
        object.__setattr__(self, "flux", flux)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.flux.shape  # type: ignore[return-value]

    def row_contrast(self) -> np.ndarray:
        """Per-row modulation (max - min) / max."""
        return _modulation(self.flux)

    def with_rows(
        self, flux: np.ndarray, applied_shifts: List[int], flagged_rows: List[int]
    ) -> "CarpetImage":
        return replace(
            self, flux=flux, applied_shifts=applied_shifts, flagged_rows=flagged_rows
        )


@dataclass(frozen=True)
class FitResult(BaseModel):
    """Outcome of the wavefront-curvature fit."""

    r_hat: float
    r_uncertainty: float
    objective_curve: List[Tuple[float, float]] = field(default_factory=list)
    converged: bool = True
    search: Tuple[float, float] = (math.nan, math.nan)

    UNIT_SUFFIX_MAP = {"r_hat": "_m", "r_uncertainty": "_m"}

    def __post_init__(self) -> None:
        values = [value for _, value in self.objective_curve]
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ConfigurationError("Objective curve must be finite and non-negative")
        object.__setattr__(
            self, "objective_curve", sorted((float(r), float(v)) for r, v in self.objective_curve)
        )

    @property
    def minimum(self) -> float:
        return min(value for _, value in self.objective_curve)
