"""
Paraxial propagation of sampled 1-D wave fields.

Free space is applied as the Fresnel transfer function exp(-iπλz f²) on the
FFT spectrum; the global piston exp(ikz) is dropped everywhere.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from resource_classes import ConfigurationError, DomainError
from ..data_models.physics import Wavelength
from ..data_models.wavefield import FarFieldFrame, TransverseGrid, WaveField

logger = logging.getLogger(__name__)

SAMPLES_PER_PERIOD = 16


def make_grid(window: float, n: int, finest_period: Optional[float] = None) -> TransverseGrid:
    """
    Build the transverse grid.

    :param window:
        Total transverse extent in metres.
    :param n:
        Sample count, a power of two >= 1024.
    :param finest_period:
        Smallest grating period that will be registered on the grid; the
        spacing has to resolve it with at least 16 samples.
    :returns:
        The grid.
    :rtype: TransverseGrid
    """
    grid = TransverseGrid(window=window, n=n)
    if finest_period is not None and grid.spacing > finest_period / SAMPLES_PER_PERIOD:
        raise ConfigurationError(
            f"Grid spacing {grid.spacing:.4g} m is too coarse for a "
            f"{finest_period:.4g} m period (needs <= period/{SAMPLES_PER_PERIOD})"
        )
    return grid


def transfer_function(grid: TransverseGrid, wavelength: Wavelength, dz: float) -> np.ndarray:
    """Fresnel transfer function in FFT order."""
    f = grid.frequencies
    return np.exp(-1j * np.pi * wavelength.metres * dz * f**2)


def propagate(field: WaveField, dz: float) -> WaveField:
    """Free-space propagation over `dz` >= 0; returns the field at `field.z + dz`."""
    if dz < 0 or math.isnan(dz):
        raise DomainError(f"Propagation distance must be >= 0, got {dz}")
    if dz == 0:
        return field
    spectrum = np.fft.fft(field.amplitudes)
    spectrum *= transfer_function(field.grid, field.wavelength, dz)
    return field.replace(np.fft.ifft(spectrum), z=field.z + dz)


def curvature_phase(grid: TransverseGrid, wavelength: Wavelength, radius: float) -> np.ndarray:
    """exp(-i k x² / 2R); R > 0 converges."""
    if radius == 0:
        raise DomainError("Radius of curvature 0 is not a wavefront")
    if math.isinf(radius):
        return np.ones(grid.n, dtype=complex)
    return np.exp(-1j * wavelength.wavenumber * grid.x**2 / (2.0 * radius))


def apply_curvature(field: WaveField, radius: float) -> WaveField:
    """Multiply by the curvature phase; an infinite radius is the identity."""
    if math.isinf(radius):
        return field
    return field.replace(field.amplitudes * curvature_phase(field.grid, field.wavelength, radius))


def flux(field: WaveField) -> float:
    """Σ |amplitude|² · spacing."""
    return field.flux


def far_field(field: WaveField, z_det: float, fresnel: bool = False) -> FarFieldFrame:
    """
    Intensity on a detector `z_det` behind the field's plane.

    The FFT frequency f maps to x_det = λ z_det f and the intensity is scaled so
    that its integral over x_det equals the field's flux.

    :param field:
        Field just after the last grating.
    :param z_det:
        Detector distance in metres.
    :param fresnel:
        Apply the Fresnel input chirp exp(i k x² / 2 z_det) before the
        transform. Needed when the aperture is not in the Fraunhofer regime
        (a 150 µm beam at 1 m), where the orders image the beam.
    :returns:
        The detector frame, ordered by increasing x_det.
    :rtype: FarFieldFrame
    """
    if z_det <= 0:
        raise DomainError(f"Detector distance must be positive, got {z_det}")
    if field.z > 0 and z_det < 100.0 * field.z:
        raise ConfigurationError(
            f"Detector at {z_det} m is too close to a field at z = {field.z} m"
        )
    grid = field.grid
    wavelength = field.wavelength.metres
    amplitudes = field.amplitudes
    if fresnel:
        amplitudes = amplitudes * np.exp(
            1j * field.wavelength.wavenumber * grid.x**2 / (2.0 * z_det)
        )
    spectrum = np.fft.fftshift(np.fft.fft(amplitudes))
    coordinates = wavelength * z_det * np.fft.fftshift(grid.frequencies)
    intensity = np.abs(spectrum) ** 2 * grid.spacing**2 / (wavelength * z_det)
    return FarFieldFrame(coordinates=coordinates, intensity=intensity)
