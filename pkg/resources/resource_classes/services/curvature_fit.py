"""Fit of the incident radius of wavefront curvature to a far-field frame stack."""

from __future__ import annotations

import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import optimize
from tqdm import tqdm

from resource_classes import ConfigurationError, InsufficientFrames, NonFiniteObjective
from ..data_models.beam import GSMBeam
from ..data_models.grating import GratingSpec
from ..data_models.results import FitResult
from ..data_models.wavefield import FarFieldFrame
from .interferometer import Interferometer

logger = logging.getLogger(__name__)

GRID_SIZE = 25
GOLDEN_TOLERANCE = 5e-4
UNCERTAINTY_LEVEL = 1.05
NOISE_GENERATOR = "numpy.random.PCG64"
MIN_FRAMES = 3


def perturb_frames(
    frames: Sequence[FarFieldFrame], sigma_rel: float, seed: int
) -> List[FarFieldFrame]:
    """Multiplicative Gaussian noise I·(1 + σ N(0, 1)), clipped at zero."""
    if sigma_rel < 0:
        raise ConfigurationError(f"Noise level must be >= 0, got {sigma_rel}")
    if sigma_rel == 0:
        return list(frames)
    rng = np.random.Generator(np.random.PCG64(seed))
    noisy = []
    for frame in frames:
        factor = 1.0 + sigma_rel * rng.standard_normal(frame.intensity.size)
        noisy.append(
            FarFieldFrame(
                coordinates=frame.coordinates,
                intensity=np.clip(frame.intensity * factor, 0.0, None),
                shift=frame.shift,
            )
        )
    return noisy


class CurvatureFitter:
    """
    Least-squares fit of R with every other parameter of the setup known.

    Both measured and simulated frames are normalized to unit integral, so
    only the pattern shape enters the objective.
    """

    def __init__(
        self,
        interferometer: Interferometer,
        frames: Sequence[FarFieldFrame],
        beam: GSMBeam,
        g1: GratingSpec,
        g2: GratingSpec,
        z_sep: float,
        z_det: float,
    ) -> None:
        if len(frames) < MIN_FRAMES:
            raise InsufficientFrames(
                f"Curvature fit needs at least {MIN_FRAMES} frames, got {len(frames)}"
            )
        if any(frame.shift is None for frame in frames):
            raise InsufficientFrames("Every frame needs the G2 shift it was taken at")
        self.interferometer = interferometer
        self.frames = list(frames)
        self.beam = beam
        self.g1 = g1
        self.g2 = g2
        self.z_sep = z_sep
        self.z_det = z_det
        self.shifts = [float(frame.shift) for frame in frames]  # type: ignore[arg-type]
        self._measured = [frame.normalized() for frame in self.frames]
        self.evaluations: Dict[float, float] = {}

    def simulate(self, radius: float) -> List[FarFieldFrame]:
        """Frames the setup would record for an incident radius `radius`."""
        return self.interferometer.farfield_series(
            self.beam.with_radius(radius),
            self.g1,
            self.g2,
            self.z_sep,
            self.shifts,
            self.z_det,
            fresnel=True,
        )

    def objective(self, radius: float) -> float:
        """
        Sum over frames of squared differences between normalized measured
        and simulated intensities, on the measured detector positions.
        """
        radius = float(radius)
        if radius in self.evaluations:
            return self.evaluations[radius]
        total = 0.0
        for measured, expected, simulated in zip(self.frames, self._measured, self.simulate(radius)):
            binned = simulated.rebin(measured.pitch)
            values = np.interp(measured.coordinates, binned.coordinates, binned.intensity)
            area = np.sum(values) * measured.pitch
            if area > 0:
                values = values / area
            total += float(np.sum((expected - values) ** 2))
        if not math.isfinite(total):
            raise NonFiniteObjective(f"Objective is {total} at R = {radius} m")
        logger.debug("objective(R = %.6g m) = %.6g", radius, total)
        self.evaluations[radius] = total
        return total

    def _crossing(self, radius: float, toward: float, threshold: float) -> float:
        """First R between `radius` and `toward` where the objective reaches `threshold`."""
        inner = radius
        side = sorted(
            (r for r in self.evaluations if (r - radius) * (toward - radius) > 0),
            key=lambda r: abs(r - radius),
        )
        for outer in side:
            if self.evaluations[outer] >= threshold:
                return float(
                    optimize.brentq(
                        lambda r: self.objective(r) - threshold, min(inner, outer), max(inner, outer),
                        rtol=1e-4,
                    )
                )
            inner = outer
        return toward

    def fit(self, r_min: float, r_max: float, show_progress: bool = False) -> FitResult:
        """
        Coarse logarithmic grid over [r_min, r_max], then golden-section
        refinement around the best grid point.

        :param r_min:
            Smallest radius searched, metres.
        :param r_max:
            Largest radius searched, metres.
        :returns:
            Best radius, its half-width at 1.05 x the minimum and every
            objective evaluation made.
        :rtype: FitResult
        """
        if not 0 < r_min < r_max:
            raise ConfigurationError(f"Search needs 0 < r_min < r_max, got ({r_min}, {r_max})")
        candidates = np.geomspace(r_min, r_max, GRID_SIZE)
        logger.info("Fitting R on %d candidates in [%.4g, %.4g] m", GRID_SIZE, r_min, r_max)
        values = [
            self.objective(r)
            for r in tqdm(candidates, desc="Curvature grid", unit="R", disable=not show_progress)
        ]
        best = int(np.argmin(values))
        converged = 0 < best < GRID_SIZE - 1
        if converged:
            bracket: Tuple[float, float, float] = (
                candidates[best - 1],
                candidates[best],
                candidates[best + 1],
            )
            result = optimize.minimize_scalar(
                self.objective, bracket=bracket, method="golden", tol=GOLDEN_TOLERANCE
            )
            r_hat = float(result.x)
        else:
            r_hat = float(candidates[best])
            logger.warning("Objective minimum on the search boundary at R = %.4g m", r_hat)

        r_best = min(self.evaluations, key=self.evaluations.__getitem__)
        threshold = UNCERTAINTY_LEVEL * self.evaluations[r_best]
        lower = self._crossing(r_best, r_min, threshold)
        upper = self._crossing(r_best, r_max, threshold)
        logger.info("Fitted R = %.4g m (+/- %.2g m)", r_hat, (upper - lower) / 2.0)
        return FitResult(
            r_hat=r_hat,
            r_uncertainty=(upper - lower) / 2.0,
            objective_curve=list(self.evaluations.items()),
            converged=converged,
            search=(r_min, r_max),
        )
