from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

from ..constants import MM, NM, UM
from ..data_models.config import RunConfig
from ..data_models.context import SimulationContext
from ..data_models.physics import SetupGeometry
from ..data_models.wavefield import FarFieldFrame
from ..repositories.output_repository import OutputRepository, format_number
from .alignment import align_carpet_rows
from .curvature_fit import NOISE_GENERATOR, CurvatureFitter, perturb_frames
from .interferometer import Interferometer, shifts_over_period
from .physics import (
    convergence_angle,
    de_broglie_wavelength,
    demagnified_period,
    moire_beat_period,
    revival_plane,
    talbot_distance,
)
from .propagation import make_grid

logger = logging.getLogger(__name__)

# full Talbot length, i.e. the second half-Talbot revival
TALBOT_ORDER = 2


class Experiment:
    """
    Service class running one measurement mode of the interferometer from a
    resolved configuration and writing its results.

    Responsibilities:
    - Derive wavelength, grid, gratings, beam and scan from the configuration.
    - Run the interferometer for the requested mode.
    - Persist results, plus the resolved configuration, via `OutputRepository`.
    """

    def __init__(
        self,
        config: RunConfig,
        output_dir: str | Path,
        threads: int = 1,
        seed: Optional[int] = None,
        show_progress: bool = False,
    ) -> None:
        self.config = config
        self.seed = config.noise.seed if seed is None else seed
        self.wavelength = de_broglie_wavelength(config.energy)
        self.g1 = config.grating1.to_spec()
        self.g2 = config.grating2.to_spec()
        self.beam = config.beam.to_beam()
        self.talbot = talbot_distance(self.g1.period, self.wavelength)
        grid = make_grid(
            config.grid.window_um * UM,
            config.grid.n,
            finest_period=min(self.g1.period, self.g2.period),
        )
        self.context = SimulationContext(
            grid=grid,
            wavelength=self.wavelength,
            members=config.ensemble.m,
            threads=threads,
            show_progress=show_progress,
        )
        self.interferometer = Interferometer(self.context)
        self.repo = OutputRepository(output_dir, config)

    # --- helpers ---
    def _metadata(self, **extra: float) -> Dict[str, str]:
        metadata = {
            "energy_kev": format_number(self.config.energy_kev),
            "wavelength_pm": format_number(self.wavelength.picometres),
            "talbot_distance_mm": format_number(self.talbot / MM),
        }
        metadata.update({key: format_number(value) for key, value in extra.items()})
        return metadata

    def _setup_metadata(self) -> Dict[str, str]:
        """Gratings and beam as `grating1.period_m = ...` style entries."""
        lines = (
            self.g1.describe("grating1.")
            + self.g2.describe("grating2.")
            + self.beam.describe("beam.")
        )
        return dict(line.split(" = ", 1) for line in lines)

    def _geometry(self, z_sep: float) -> SetupGeometry:
        return SetupGeometry(z_sep=z_sep, z_det=self.config.detector.z_m)

    def _bin(self, frames: List[FarFieldFrame]) -> List[FarFieldFrame]:
        pixel = self.config.detector.pixel_um * UM
        return [frame.rebin(pixel) for frame in frames]

    # --- measurement modes ---
    def carpet(self, align: bool = True) -> Path:
        """Talbot carpet over the configured scan, optionally row-aligned."""
        carpet = self.interferometer.talbot_carpet(
            self.beam, self.g1, self.g2, self.config.scan.to_scan()
        )
        if align:
            carpet = align_carpet_rows(carpet)
        carpet = replace(carpet, metadata={**self._metadata(), **self._setup_metadata()})
        self.repo.write_config_echo()
        return self.repo.write_carpet_pgm(carpet)

    def moire(self) -> Path:
        """Normalized transmission over the scan's G2 shifts at one separation."""
        geometry = self._geometry(self.config.setup.z_sep(self.talbot))
        curve = self.interferometer.moire_scan(
            self.beam, self.g1, self.g2, geometry.z_sep, self.config.scan.to_scan().x_values()
        )
        curve = replace(curve, metadata=self._metadata(z_sep_mm=geometry.z_sep / MM))
        self.repo.write_config_echo()
        return self.repo.write_curve_csv(curve)

    def farfield(self) -> Path:
        """Single far-field frame with G2 at its configured offset."""
        geometry = self._geometry(self.config.setup.z_sep(self.talbot))
        frame = self._bin(
            self.interferometer.farfield_series(
                self.beam, self.g1, self.g2, geometry.z_sep, [0.0], geometry.z_det
            )
        )[0]
        self.repo.write_config_echo()
        return self.repo.write_table(
            "farfield.csv",
            ("x_um", "intensity"),
            zip(frame.coordinates / UM, frame.intensity),
            self._metadata(z_sep_mm=geometry.z_sep / MM, z_det_m=geometry.z_det),
        )

    def demag(self) -> Path:
        """Frame stack over one period of G2 shifts, with optional noise."""
        geometry = self._geometry(self.config.setup.z_sep(self.talbot))
        shifts = shifts_over_period(self.g2.period, self.config.setup.shift_count)
        frames = self._bin(
            self.interferometer.demag_farfield_series(
                self.beam, self.g1, self.g2, geometry.z_sep, shifts, geometry.z_det
            )
        )
        metadata = self._metadata(
            z_sep_mm=geometry.z_sep / MM,
            z_det_m=geometry.z_det,
            convergence_rad=convergence_angle(self.beam),
            moire_beat_um=moire_beat_period(self.g1.period, self.beam.radius, geometry.z_sep) / UM,
        )
        metadata.update(self._setup_metadata())
        if self.config.noise.sigma_rel > 0:
            frames = perturb_frames(frames, self.config.noise.sigma_rel, self.seed)
            metadata.update(
                {
                    "noise_generator": NOISE_GENERATOR,
                    "noise_seed": str(self.seed),
                    "noise_sigma_rel": format_number(self.config.noise.sigma_rel),
                }
            )
        orders = [
            Interferometer.order_intensities(
                frame, self.g2.period, geometry.z_det, self.wavelength
            )
            for frame in frames
        ]
        self.repo.write_config_echo()
        self.repo.write_orders(orders, shifts)
        return self.repo.write_frames(frames, metadata=metadata)

    def fit(self, frames_dir: str | Path) -> Path:
        """Fit the radius of curvature to a frame stack written by `demag`."""
        frames_dir = Path(frames_dir)
        frames = OutputRepository(frames_dir.parent).read_frames(frames_dir.name)
        geometry = self._geometry(self.config.setup.z_sep(self.talbot))
        fitter = CurvatureFitter(
            self.interferometer,
            frames,
            self.beam,
            self.g1,
            self.g2,
            geometry.z_sep,
            geometry.z_det,
        )
        result = fitter.fit(
            self.config.fit.r_min_m, self.config.fit.r_max_m, self.context.show_progress
        )
        self.repo.write_config_echo()
        return self.repo.write_fit(result, self._metadata(z_sep_mm=geometry.z_sep / MM))

    def revival_period(self) -> Path:
        """Measured near-field period at the curvature-corrected revival plane."""
        if self.config.setup.z_sep_mm == "talbot":
            z_sep = revival_plane(TALBOT_ORDER, self.wavelength, self.g1.period, self.beam.radius)
        else:
            z_sep = float(self.config.setup.z_sep_mm) * MM
        measured = self.interferometer.revival_period(self.beam, self.g1, z_sep)
        predicted = demagnified_period(self.g1.period, self.beam.radius, z_sep)
        logger.info(
            "Revival period at z = %.4g mm: %.6g nm (geometric %.6g nm)",
            z_sep / MM,
            measured / NM,
            predicted / NM,
        )
        self.repo.write_config_echo()
        return self.repo.write_revival(z_sep, measured, predicted)
