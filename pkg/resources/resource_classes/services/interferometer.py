"""Two-grating Talbot interferometer: moiré scans, carpets and far-field frame series."""

from __future__ import annotations

import logging
from collections import OrderedDict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from resource_classes import DomainError, InsufficientFrames, NoRevivalFound
from ..data_models.beam import GSMBeam
from ..data_models.context import SimulationContext
from ..data_models.grating import GratingSpec
from ..data_models.physics import ScanSpec, Wavelength
from ..data_models.results import CarpetImage, TransmissionCurve
from ..data_models.wavefield import FarFieldFrame, WaveField
from .coherence import gsm_ensemble, incoherent_intensity, map_members
from .grating_optics import build_transmission
from .propagation import far_field, propagate, transfer_function

logger = logging.getLogger(__name__)

REVIVAL_BAND = (0.75, 1.25)
REVIVAL_FLOOR = 0.01
REVIVAL_PADDING = 4
SPECTRA_CACHE_SIZE = 2


class Interferometer:
    """
    Simulates the G1 -> free space -> G2 -> detector chain for a partially
    coherent beam.

    Ensembles and their spectra after G1 are cached per (beam, G1), so a scan
    over many separations and shifts only pays for one FFT per member per plane.
    Only the most recent `SPECTRA_CACHE_SIZE` keys are kept; a curvature fit
    asks for a new beam on every objective call.
    """

    def __init__(self, context: SimulationContext) -> None:
        self.context = context
        self.grid = context.grid
        self.wavelength = context.wavelength
        self._spectra: OrderedDict[
            Tuple[GSMBeam, GratingSpec, int], Tuple[List[float], List[np.ndarray]]
        ] = OrderedDict()

    def _progress(self, desc: str) -> Optional[str]:
        return desc if self.context.show_progress else None

    # --- building blocks ---
    def transmitted_field(
        self, member: WaveField, g1: GratingSpec, z_sep: float, g2: GratingSpec
    ) -> WaveField:
        """
        Field just after G2.

        :param member:
            Coherent field incident on G1.
        :param g1:
            Beam-splitter grating.
        :param z_sep:
            G1-G2 separation in metres.
        :param g2:
            Analyzer grating, at its own lateral offset.
        :returns:
            The field at z = z_sep behind G2.
        :rtype: WaveField
        """
        after_g1 = member.replace(member.amplitudes * build_transmission(g1, member.grid))
        at_g2 = propagate(after_g1, z_sep)
        return at_g2.replace(at_g2.amplitudes * build_transmission(g2, member.grid))

    def _member_spectra(
        self, beam: GSMBeam, g1: GratingSpec, members: Optional[int] = None
    ) -> Tuple[List[float], List[np.ndarray]]:
        count = members or self.context.members
        key = (beam, g1, count)
        if key in self._spectra:
            self._spectra.move_to_end(key)
            return self._spectra[key]
        ensemble = gsm_ensemble(beam, self.grid, self.wavelength, count)
        t1 = build_transmission(g1, self.grid)
        spectra = [np.fft.fft(field.amplitudes * t1) for field in ensemble.fields]
        self._spectra[key] = (ensemble.weights, spectra)
        logger.debug("Cached %d member spectra after G1", count)
        while len(self._spectra) > SPECTRA_CACHE_SIZE:
            self._spectra.popitem(last=False)
        return self._spectra[key]

    def _intensity_at(
        self,
        weights: Sequence[float],
        spectra: Sequence[np.ndarray],
        z: float,
        threads: int = 1,
    ) -> np.ndarray:
        if z < 0:
            raise DomainError(f"Separation must be >= 0, got {z}")
        kernel = transfer_function(self.grid, self.wavelength, z)
        intensities = map_members(
            lambda spectrum: np.abs(np.fft.ifft(spectrum * kernel)) ** 2, spectra, threads
        )
        return incoherent_intensity(list(zip(weights, intensities)))

    def _analyzer_masks(self, g2: GratingSpec, shifts: Iterable[float]) -> np.ndarray:
        """|t2|² per shift; the shift adds to G2's own offset."""
        return np.stack(
            [
                np.abs(build_transmission(g2.shifted(g2.lateral_offset + shift), self.grid)) ** 2
                for shift in shifts
            ]
        )

    def near_field_intensity(
        self, beam: GSMBeam, g1: GratingSpec, z_sep: float, members: Optional[int] = None
    ) -> np.ndarray:
        """Ensemble intensity at z_sep behind G1, without G2."""
        weights, spectra = self._member_spectra(beam, g1, members)
        return self._intensity_at(weights, spectra, z_sep, self.context.threads)

    # --- scan observables ---
    def total_flux(
        self, beam: GSMBeam, g1: GratingSpec, z_sep: float, g2: GratingSpec, shift: float
    ) -> float:
        """Ensemble-weighted flux just after G2 moved laterally by `shift`."""
        intensity = self.near_field_intensity(beam, g1, z_sep)
        mask = self._analyzer_masks(g2, [shift])[0]
        return float(np.sum(intensity * mask) * self.grid.spacing)

    def moire_scan(
        self,
        beam: GSMBeam,
        g1: GratingSpec,
        g2: GratingSpec,
        z_sep: float,
        shifts: Sequence[float],
    ) -> TransmissionCurve:
        """Flux over G2 shifts at one separation, normalized to the curve maximum."""
        if len(shifts) < 2:
            raise InsufficientFrames("A moiré scan needs at least 2 shifts")
        intensity = self.near_field_intensity(beam, g1, z_sep)
        masks = self._analyzer_masks(g2, shifts)
        flux = masks @ intensity * self.grid.spacing
        peak = flux.max()
        curve = TransmissionCurve(
            shifts=np.asarray(shifts, dtype=float), flux=flux / peak if peak > 0 else flux
        )
        logger.info("Moiré scan at z = %.4g m: contrast %.3f", z_sep, curve.contrast)
        return curve

    def talbot_carpet(
        self, beam: GSMBeam, g1: GratingSpec, g2: GratingSpec, scan: ScanSpec
    ) -> CarpetImage:
        """
        Flux after G2 over separations (rows) and G2 shifts (columns).

        Rows are computed in parallel and stored in order.
        """
        z_values = scan.z_values()
        x_values = scan.x_values()
        weights, spectra = self._member_spectra(beam, g1)
        masks = self._analyzer_masks(g2, x_values)
        logger.info(
            "Computing carpet of %d x %d over z = %.4g..%.4g m",
            z_values.size,
            x_values.size,
            z_values[0],
            z_values[-1],
        )

        def row(z: float) -> np.ndarray:
            return masks @ self._intensity_at(weights, spectra, z) * self.grid.spacing

        rows = map_members(row, z_values, self.context.threads, desc=self._progress("Carpet rows"))
        return CarpetImage(z_values=z_values, x_values=x_values, flux=np.vstack(rows))

    # --- far field ---
    def farfield_series(
        self,
        beam: GSMBeam,
        g1: GratingSpec,
        g2: GratingSpec,
        z_sep: float,
        shifts: Sequence[float],
        z_det: float,
        fresnel: bool = True,
    ) -> List[FarFieldFrame]:
        """Ensemble far-field frame behind G2 for every shift."""
        weights, spectra = self._member_spectra(beam, g1)
        kernel = transfer_function(self.grid, self.wavelength, z_sep)
        at_g2 = [
            WaveField(
                grid=self.grid,
                amplitudes=np.fft.ifft(spectrum * kernel),
                wavelength=self.wavelength,
                z=z_sep,
            )
            for spectrum in spectra
        ]
        frames: List[FarFieldFrame] = []
        progress = tqdm(
            shifts, desc="Far-field frames", unit="frame", disable=not self.context.show_progress
        )
        for shift in progress:
            t2 = build_transmission(g2.shifted(g2.lateral_offset + shift), self.grid)
            detected = map_members(
                lambda field: far_field(field.replace(field.amplitudes * t2), z_det, fresnel),
                at_g2,
                self.context.threads,
            )
            intensity = incoherent_intensity([(w, f.intensity) for w, f in zip(weights, detected)])
            frames.append(
                FarFieldFrame(coordinates=detected[0].coordinates, intensity=intensity, shift=float(shift))
            )
        return frames

    def demag_farfield_series(
        self,
        beam: GSMBeam,
        g1: GratingSpec,
        g2: GratingSpec,
        z_sep: float,
        shifts: Sequence[float],
        z_det: float,
    ) -> List[FarFieldFrame]:
        """Far-field series of a curved (demagnified Talbot) beam."""
        if beam.collimated:
            raise DomainError("The demagnified series needs a finite radius of curvature")
        logger.info(
            "Demag series: R = %.4g m, z = %.4g m, %d shifts", beam.radius, z_sep, len(shifts)
        )
        return self.farfield_series(beam, g1, g2, z_sep, shifts, z_det, fresnel=True)

    # --- diagnostics ---
    def revival_period(self, beam: GSMBeam, g1: GratingSpec, z_sep: float) -> float:
        """
        Local fringe period of the coherent near field at z_sep, near the beam axis.

        Peak of the zero-padded magnitude spectrum within 0.75/d..1.25/d,
        refined with a parabola through the log magnitudes.
        """
        intensity = self.near_field_intensity(beam, g1, z_sep, members=1)
        inside = np.abs(self.grid.x - beam.center) <= beam.width
        segment = intensity[inside]
        size = REVIVAL_PADDING * segment.size
        spectrum = np.abs(np.fft.rfft(segment, n=size))
        frequencies = np.fft.rfftfreq(size, d=self.grid.spacing)
        low, high = (edge / g1.period for edge in REVIVAL_BAND)
        band = np.flatnonzero((frequencies >= low) & (frequencies <= high))
        peak = band[np.argmax(spectrum[band])]
        if spectrum[peak] < REVIVAL_FLOOR * spectrum[0] or peak in (0, spectrum.size - 1):
            raise NoRevivalFound(f"No fringe at the grating period at z = {z_sep:.4g} m")
        left, centre, right = np.log(spectrum[peak - 1 : peak + 2])
        offset = 0.5 * (left - right) / (left - 2.0 * centre + right)
        frequency = frequencies[peak] + offset * (frequencies[1] - frequencies[0])
        return float(1.0 / frequency)

    @staticmethod
    def order_intensities(
        frame: FarFieldFrame,
        period: float,
        z_det: float,
        wavelength: Wavelength,
        orders: Iterable[int] = range(-2, 3),
    ) -> Dict[int, float]:
        """Integrated intensity of each diffraction order, within half the order spacing."""
        spacing = wavelength.metres * z_det / period
        result: Dict[int, float] = {}
        for order in orders:
            inside = np.abs(frame.coordinates - order * spacing) < spacing / 2.0
            result[int(order)] = float(np.sum(frame.intensity[inside]) * frame.pitch)
        return result

    @staticmethod
    def moire_phase_map(
        frames: Sequence[FarFieldFrame], period: float, window: Tuple[float, float]
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Phase of the first harmonic of each pixel's intensity over the G2 shifts.

        Frames must share coordinates and cover one grating period of shifts.
        The unwrapped phase across `window` slopes by 2π per moiré beat, its
        sign giving the direction the intensity null travels.
        """
        if len(frames) < 3:
            raise InsufficientFrames("A phase map needs at least 3 shifts")
        if any(frame.shift is None for frame in frames):
            raise InsufficientFrames("Every frame needs the G2 shift it was taken at")
        shifts = np.array([frame.shift for frame in frames], dtype=float)
        stack = np.vstack([frame.intensity for frame in frames])
        harmonic = np.exp(-2j * np.pi * shifts / period) @ stack
        coordinates = frames[0].coordinates
        inside = (coordinates >= window[0]) & (coordinates <= window[1])
        return coordinates[inside], np.unwrap(np.angle(harmonic[inside]))


def shifts_over_period(period: float, count: int) -> np.ndarray:
    """`count` equally spaced G2 shifts covering one period, starting at 0."""
    if count < 2:
        raise InsufficientFrames(f"Need at least 2 shifts, got {count}")
    return period * np.arange(count) / count
