"""
Gaussian Schell-model beams as incoherent ensembles of tilted coherent beams.

The mutual coherence exp(-Δx² / 2ℓc²) is reproduced by tilts with a Gaussian
angular spread σθ = λ / (2π ℓc); the ensemble is truncated at ±2σθ. The
weights are a composite Simpson rule over that span.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from tqdm import tqdm

from resource_classes import ConfigurationError
from ..data_models.beam import Ensemble, GSMBeam
from ..data_models.physics import Wavelength
from ..data_models.wavefield import TransverseGrid, WaveField
from .propagation import apply_curvature

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def tilt_angles(beam: GSMBeam, wavelength: Wavelength, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Member tilts (rad) on a uniform ±2σθ grid and their normalized weights."""
    if m < 1 or m % 2 == 0:
        raise ConfigurationError(f"Ensemble size must be odd and >= 1, got {m}")
    if m == 1:
        return np.zeros(1), np.ones(1)
    half_width = wavelength.metres / (np.pi * beam.coherence_width)
    sigma = half_width / 2.0
    angles = np.linspace(-half_width, half_width, m)
    # Simpson factors 1, 4, 2, ..., 4, 1; m odd gives an even number of intervals
    simpson = np.full(m, 2.0)
    simpson[1::2] = 4.0
    simpson[[0, -1]] = 1.0
    weights = simpson * np.exp(-(angles**2) / (2.0 * sigma**2))
    return angles, weights / np.sum(weights)


def gsm_ensemble(
    beam: GSMBeam, grid: TransverseGrid, wavelength: Wavelength, m: int
) -> Ensemble:
    """
    Build the tilted-beam ensemble of a Gaussian Schell-model beam at G1.

    :param beam:
        Width, coherence width, curvature and axis of the beam.
    :param grid:
        Transverse grid; its window must be at least twice the beam width.
    :param wavelength:
        de Broglie wavelength of the electrons.
    :param m:
        Number of members, odd and >= 1. One member is a coherent beam.
    :returns:
        Members with unit flux each and weights summing to one.
    :rtype: Ensemble
    """
    if m < 1 or m % 2 == 0:
        raise ConfigurationError(f"Ensemble size must be odd and >= 1, got {m}")
    if grid.window < 2.0 * beam.width:
        raise ConfigurationError(
            f"Window {grid.window:.4g} m is smaller than twice the beam width {beam.width:.4g} m"
        )
    x = grid.x
    envelope = np.exp(-(((x - beam.center) / (beam.width / 2.0)) ** 2))
    envelope = envelope / np.sqrt(np.sum(envelope**2) * grid.spacing)

    angles, weights = tilt_angles(beam, wavelength, m)
    members: List[Tuple[float, WaveField]] = []
    for angle, weight in zip(angles, weights):
        amplitudes = envelope * np.exp(1j * wavelength.wavenumber * angle * x)
        member = WaveField(grid=grid, amplitudes=amplitudes, wavelength=wavelength)
        members.append((float(weight), apply_curvature(member, beam.radius)))

    logger.debug("Built %d-member ensemble (coherence width %.3g m)", m, beam.coherence_width)
    return Ensemble(members=members)


def incoherent_intensity(results: Sequence[Tuple[float, np.ndarray]]) -> np.ndarray:
    """Weighted sum of member intensities (never of amplitudes)."""
    if not results:
        raise ConfigurationError("No member intensities to combine")
    shape = np.shape(results[0][1])
    total = np.zeros(shape, dtype=float)
    for weight, intensity in results:
        if np.shape(intensity) != shape:
            raise ConfigurationError(
                f"Member intensity of shape {np.shape(intensity)} does not match {shape}"
            )
        if weight < 0:
            raise ConfigurationError(f"Ensemble weight must be >= 0, got {weight}")
        total += weight * np.asarray(intensity, dtype=float)
    return total


def map_members(
    function: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    desc: Optional[str] = None,
) -> List[R]:
    """
    Apply `function` to every item, results in input order for any thread count.

    A progress bar is shown when `desc` is given.
    """
    items = list(items)
    progress = dict(total=len(items), desc=desc, unit="item", disable=desc is None)
    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in tqdm(items, **progress)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(tqdm(pool.map(function, items), **progress))
