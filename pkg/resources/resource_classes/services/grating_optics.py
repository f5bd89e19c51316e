"""
Nanograting transmission functions and their Fourier orders.

A slit is open on -w/2 <= ξ < w/2 around its centre; bars transmit nothing.
With the slit phase enabled the open region carries exp(-i φ(ξ)),
φ(ξ) = min(beta / (w/2 - ξ), phi_max), which strengthens the negative orders.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Dict, Tuple

import numpy as np
from scipy import optimize

from resource_classes import ConfigurationError, DomainError
from ..data_models.grating import GratingSpec, SlitPhaseModel
from ..data_models.wavefield import TransverseGrid

logger = logging.getLogger(__name__)

QUADRATURE_SAMPLES = 1024
# fractional positions are rounded so that offset and offset + d give identical masks
_FRACTION_DIGITS = 9


def _slit_fraction(position: np.ndarray, period: float) -> np.ndarray:
    """Position relative to the nearest slit centre, in periods, in [-0.5, 0.5)."""
    frac = np.round(np.mod(position / period, 1.0), _FRACTION_DIGITS)
    frac = np.where(frac >= 1.0, 0.0, frac)
    return np.where(frac >= 0.5, frac - 1.0, frac)


def _slit_profile(spec: GratingSpec, fraction: np.ndarray) -> np.ndarray:
    half = round(spec.open_width / (2.0 * spec.period), _FRACTION_DIGITS)
    is_open = (fraction >= -half) & (fraction < half)
    transmission = is_open.astype(complex)
    if spec.phase.enabled and spec.phase.beta > 0:
        xi = fraction[is_open] * spec.period
        distance = spec.open_width / 2.0 - xi
        phi = np.minimum(spec.phase.beta / distance, spec.phase.phi_max)
        transmission[is_open] = np.exp(-1j * phi)
    return transmission


def build_transmission(spec: GratingSpec, grid: TransverseGrid) -> np.ndarray:
    """
    Complex transmission of `spec` sampled on `grid`.

    :param spec:
        The grating, translated by its `lateral_offset`.
    :param grid:
        The grid; its spacing must be at most open_width/8.
    :returns:
        One complex value per grid sample.
    :rtype: np.ndarray
    """
    if grid.spacing > spec.open_width / 8.0:
        raise ConfigurationError(
            f"Grid spacing {grid.spacing:.4g} m cannot resolve a "
            f"{spec.open_width:.4g} m slit (needs <= open_width/8)"
        )
    fraction = _slit_fraction(grid.x - spec.lateral_offset, spec.period)
    return _slit_profile(spec, fraction)


def fourier_orders(
    spec: GratingSpec, n_max: int, samples: int = QUADRATURE_SAMPLES
) -> Dict[int, complex]:
    """
    Order amplitudes c_n = (1/d) ∫ t(ξ) exp(-2πi n ξ/d) dξ for |n| <= n_max.

    Midpoint quadrature over one centred period; the lateral offset x0
    enters as the factor exp(-2πi n x0/d).
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if samples < QUADRATURE_SAMPLES:
        raise ConfigurationError(f"Quadrature needs >= {QUADRATURE_SAMPLES} samples per period")
    fraction = -0.5 + (np.arange(samples) + 0.5) / samples
    profile = _slit_profile(spec, fraction)
    orders = np.arange(-n_max, n_max + 1)
    kernel = np.exp(-2j * np.pi * np.outer(orders, fraction))
    coefficients = kernel @ profile / samples
    coefficients *= np.exp(-2j * np.pi * orders * spec.lateral_offset / spec.period)
    return {int(n): complex(c) for n, c in zip(orders, coefficients)}


def open_mean(spec: GratingSpec, samples: int = QUADRATURE_SAMPLES) -> float:
    """Period mean of |t|², the right-hand side of Parseval's relation."""
    fraction = -0.5 + (np.arange(samples) + 0.5) / samples
    return float(np.mean(np.abs(_slit_profile(spec, fraction)) ** 2))


def order_asymmetry(spec: GratingSpec) -> float:
    """|c_-1|² / |c_+1|²; above 1 when the negative first order is stronger."""
    orders = fourier_orders(spec, 1)
    return abs(orders[-1]) ** 2 / abs(orders[1]) ** 2


def calibrate_beta(
    spec: GratingSpec, ratio: float, bracket: Tuple[float, float] = (1e-13, 1e-8)
) -> float:
    """
    Slit-phase strength (rad·m) giving `order_asymmetry == ratio`.

    The asymmetry vanishes again once the clamp saturates the whole slit, so
    the first crossing of a logarithmic scan is refined with Brent's method.
    """
    if ratio <= 1.0:
        raise DomainError(f"Requested asymmetry must exceed 1, got {ratio}")

    def excess(log_beta: float) -> float:
        phase = SlitPhaseModel.from_strength(float(np.exp(log_beta)), spec.phase.phi_max)
        candidate = replace(spec, phase=phase)
        return order_asymmetry(candidate) - ratio

    scan = np.linspace(np.log(bracket[0]), np.log(bracket[1]), 41)
    values = [excess(point) for point in scan]
    for low, high, v_low, v_high in zip(scan, scan[1:], values, values[1:]):
        if v_low < 0 <= v_high:
            log_beta = optimize.brentq(excess, low, high, xtol=1e-10)
            beta = float(np.exp(log_beta))
            logger.info("Slit phase strength %.4g rad·m gives order ratio %.3f", beta, ratio)
            return beta
    raise DomainError(f"No slit phase strength in {bracket} reaches order ratio {ratio}")
