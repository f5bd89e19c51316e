"""
Closed-form relations of the interferometer: de Broglie wavelength, Talbot
distance and the geometric laws of the demagnified Talbot effect.

All lengths are in metres.
"""

from __future__ import annotations

import math

from resource_classes import DomainError
from ..constants import EL_E0, PHYS_HC
from ..data_models.beam import GSMBeam
from ..data_models.physics import BeamEnergy, Wavelength


def _require_positive(name: str, value: float) -> None:
    if not value > 0 or math.isnan(value):
        raise DomainError(f"{name} must be positive, got {value}")


def de_broglie_wavelength(energy: BeamEnergy) -> Wavelength:
    """
    Relativistic electron wavelength λ = hc / sqrt(E (E + 2 m c²)).

    :param energy:
        Kinetic energy of the electrons.
    :returns:
        The de Broglie wavelength.
    :rtype: Wavelength
    """
    kinetic = energy.joules
    return Wavelength(PHYS_HC / math.sqrt(kinetic * (kinetic + 2.0 * EL_E0)))


def talbot_distance(period: float, wavelength: Wavelength) -> float:
    """L_T = 2 d² / λ."""
    _require_positive("Grating period", period)
    return 2.0 * period**2 / wavelength.metres


def revival_plane(order: int, wavelength: Wavelength, period: float, radius: float) -> float:
    """
    Separation of the `order`-th half-Talbot revival behind G1 under a
    curved wavefront, z = n (L_T/2) R / (R + n L_T/2).

    Collimated illumination (R = inf) gives n L_T/2.
    """
    if order < 1:
        raise DomainError(f"Revival order must be >= 1, got {order}")
    if radius == 0:
        raise DomainError("Radius of curvature 0 is not a wavefront")
    flat = order * talbot_distance(period, wavelength) / 2.0
    if math.isinf(radius):
        return flat
    if radius + flat == 0:
        raise DomainError("Diverging radius cancels the revival plane")
    return flat * radius / (radius + flat)


def demagnified_period(period: float, radius: float, z: float) -> float:
    """Fringe period d (R - z) / R at distance z behind G1."""
    _require_positive("Grating period", period)
    if radius == 0:
        raise DomainError("Radius of curvature 0 is not a wavefront")
    if math.isinf(radius):
        return period
    return period * (radius - z) / radius


def moire_beat_period(period: float, radius: float, z: float) -> float:
    """
    Beat period d (R - z) / z between the demagnified revival and G2.

    Infinite for collimated illumination (no beat).
    """
    _require_positive("Separation", z)
    if math.isinf(radius):
        return math.inf
    return demagnified_period(period, radius, z) * radius / z


def convergence_angle(beam: GSMBeam) -> float:
    """Full cone angle width / R of the illuminating beam (signed, 0 when collimated)."""
    if beam.collimated:
        return 0.0
    return beam.width / beam.radius
