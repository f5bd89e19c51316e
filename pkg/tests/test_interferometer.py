import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from resource_classes import DomainError, InsufficientFrames, NoRevivalFound
from resource_classes.data_models.beam import GSMBeam
from resource_classes.data_models.context import SimulationContext
from resource_classes.data_models.grating import GratingSpec, SlitPhaseModel
from resource_classes.data_models.physics import BeamEnergy, ScanSpec
from resource_classes.services.alignment import find_revival
from resource_classes.services.coherence import gsm_ensemble
from resource_classes.services.grating_optics import build_transmission, calibrate_beta
from resource_classes.services.interferometer import (
    SPECTRA_CACHE_SIZE,
    Interferometer,
    shifts_over_period,
)
from resource_classes.services.physics import (
    de_broglie_wavelength,
    demagnified_period,
    revival_plane,
    talbot_distance,
)
from resource_classes.services.propagation import propagate

PERIOD = 100e-9


@pytest.fixture
def interferometer(test_context):
    return Interferometer(test_context)


@pytest.fixture
def coherent(coherent_context):
    return Interferometer(coherent_context)


class TestTransmittedField:
    def test_open_analyzer_passes_nearly_everything(self, coherent, wide_beam, grating):
        member = gsm_ensemble(wide_beam, coherent.grid, coherent.wavelength, 1).fields[0]
        z = 0.3e-3
        at_g2 = propagate(
            member.replace(member.amplitudes * build_transmission(grating, coherent.grid)), z
        )
        # a half-sample offset keeps every sample clear of the 1 nm bars
        open_g2 = GratingSpec(open_width=99e-9, lateral_offset=coherent.grid.spacing / 2)
        after = coherent.transmitted_field(member, grating, z, open_g2)
        assert after.flux >= 0.95 * at_g2.flux
        assert after.z == pytest.approx(z)

    def test_aligned_revival_passes_the_analyzer(self, coherent, wide_beam, grating, talbot):
        aligned = coherent.total_flux(wide_beam, grating, talbot, grating, 0.0)
        crossed = coherent.total_flux(wide_beam, grating, talbot, grating, PERIOD / 2)
        behind_g1 = np.sum(coherent.near_field_intensity(wide_beam, grating, talbot)) * coherent.grid.spacing
        assert aligned >= 0.95 * behind_g1
        assert crossed <= 0.05 * aligned


class TestMoireScan:
    def test_flux_is_periodic_in_the_shift(self, interferometer, test_beam, grating, talbot):
        first = interferometer.total_flux(test_beam, grating, talbot, grating, 23e-9)
        second = interferometer.total_flux(test_beam, grating, talbot, grating, 23e-9 + PERIOD)
        assert second == pytest.approx(first, rel=1e-9)

    def test_contrast_at_the_talbot_distance(self, interferometer, test_beam, grating, talbot):
        shifts = PERIOD * np.arange(20) / 20
        curve = interferometer.moire_scan(test_beam, grating, grating, talbot, shifts)
        assert curve.flux.max() == pytest.approx(1.0)
        assert curve.contrast >= 0.77
        assert curve.peak_shift == 0.0
        assert curve.valley_shift == pytest.approx(PERIOD / 2)

    def test_coherent_contrast_is_near_one(self, coherent, wide_beam, grating, talbot):
        shifts = PERIOD * np.arange(32) / 32
        curve = coherent.moire_scan(wide_beam, grating, grating, talbot, shifts)
        assert curve.contrast >= 0.99

    def test_half_talbot_is_the_revival_moved_by_half_a_period(
        self, coherent, wide_beam, grating, talbot
    ):
        shifts = PERIOD * np.arange(32) / 32
        half = coherent.moire_scan(wide_beam, grating, grating, talbot / 2, shifts)
        full = coherent.moire_scan(wide_beam, grating, grating, talbot, shifts + PERIOD / 2)
        assert_allclose(half.flux, full.flux, atol=0.02)

    def test_quarter_talbot_has_lower_contrast(self, interferometer, test_beam, grating, talbot):
        shifts = PERIOD * np.arange(20) / 20
        quarter = interferometer.moire_scan(test_beam, grating, grating, talbot / 4, shifts)
        full = interferometer.moire_scan(test_beam, grating, grating, talbot, shifts)
        assert quarter.contrast < full.contrast

    def test_needs_two_shifts(self, interferometer, test_beam, grating, talbot):
        with pytest.raises(InsufficientFrames):
            interferometer.moire_scan(test_beam, grating, grating, talbot, [0.0])

    def test_rejects_negative_separation(self, interferometer, test_beam, grating):
        with pytest.raises(DomainError):
            interferometer.moire_scan(test_beam, grating, grating, -1e-3, [0.0, 50e-9])


class TestTalbotCarpet:
    def test_rows_repeat_with_the_grating_period(self, interferometer, test_beam, grating, talbot):
        # 2.5 nm steps, 40 columns per period
        scan = ScanSpec(z_min=0.5 * talbot, z_max=talbot, z_step=0.25 * talbot, x_count=80)
        carpet = interferometer.talbot_carpet(test_beam, grating, grating, scan)
        assert carpet.shape == (3, 80)
        assert_allclose(carpet.flux[:, :40], carpet.flux[:, 40:], rtol=1e-9)

    def test_half_talbot_row_peaks_at_half_a_period(self, interferometer, test_beam, grating, talbot):
        scan = ScanSpec(z_min=0.5 * talbot, z_max=talbot, z_step=0.5 * talbot, x_count=40)
        carpet = interferometer.talbot_carpet(test_beam, grating, grating, scan)
        half_row, full_row = carpet.flux
        assert abs(int(np.argmax(half_row)) - 20) <= 2
        assert int(np.argmax(full_row)) in (0, 1, 39)

    @pytest.mark.parametrize("energy_kev", [4.0, 2.8, 2.0])
    def test_revival_scales_with_the_wavelength(self, energy_kev):
        wavelength = de_broglie_wavelength(BeamEnergy(energy_kev))
        talbot = talbot_distance(PERIOD, wavelength)
        context = SimulationContext.from_preset("test", wavelength)
        scan = ScanSpec(
            z_min=0.875 * talbot, z_max=1.125 * talbot, z_step=talbot / 40, x_count=40
        )
        carpet = Interferometer(context).talbot_carpet(
            GSMBeam(width=8e-6), GratingSpec(), GratingSpec(), scan
        )
        assert find_revival(carpet, talbot, talbot / 8) == pytest.approx(talbot, rel=0.03)

    def test_half_revival_is_found_at_half_the_talbot_distance(
        self, interferometer, test_beam, grating, talbot
    ):
        scan = ScanSpec(
            z_min=0.375 * talbot, z_max=0.625 * talbot, z_step=talbot / 80, x_count=40
        )
        carpet = interferometer.talbot_carpet(test_beam, grating, grating, scan)
        assert find_revival(carpet, talbot / 2, talbot / 8) == pytest.approx(talbot / 2, rel=0.03)


class TestSpectraCache:
    def test_only_the_latest_beams_are_kept(self, interferometer, grating, talbot):
        for radius in (1.0, 2.0, 3.0, 4.0, 5.0):
            interferometer.near_field_intensity(GSMBeam(width=8e-6, radius=radius), grating, talbot)
        assert len(interferometer._spectra) == SPECTRA_CACHE_SIZE
        assert [beam.radius for beam, _, _ in interferometer._spectra] == [4.0, 5.0]

    def test_a_reused_beam_stays_cached(self, interferometer, grating, talbot):
        first, second, third = (GSMBeam(width=8e-6, radius=r) for r in (1.0, 2.0, 3.0))
        before = interferometer.near_field_intensity(first, grating, talbot)
        interferometer.near_field_intensity(second, grating, talbot)
        interferometer.near_field_intensity(first, grating, talbot)
        interferometer.near_field_intensity(third, grating, talbot)
        assert [beam for beam, _, _ in interferometer._spectra] == [first, third]
        assert_array_equal(interferometer.near_field_intensity(first, grating, talbot), before)

    def test_evicted_beams_are_rebuilt_identically(self, interferometer, grating, talbot):
        beam = GSMBeam(width=8e-6, radius=2.0)
        before = interferometer.near_field_intensity(beam, grating, talbot)
        for radius in (3.0, 4.0):
            interferometer.near_field_intensity(GSMBeam(width=8e-6, radius=radius), grating, talbot)
        assert beam not in [cached for cached, _, _ in interferometer._spectra]
        assert_array_equal(interferometer.near_field_intensity(beam, grating, talbot), before)


class TestRevivalPeriod:
    def test_collimated_period_is_the_grating_period(self, interferometer, test_beam, grating, talbot):
        period = interferometer.revival_period(test_beam, grating, talbot)
        assert period == pytest.approx(PERIOD, rel=1e-3)

    @pytest.mark.parametrize("radius", [0.5, 2.15, 10.0])
    def test_converging_beam_demagnifies(self, interferometer, grating, radius):
        beam = GSMBeam(width=8e-6, radius=radius)
        z = revival_plane(2, interferometer.wavelength, PERIOD, radius)
        period = interferometer.revival_period(beam, grating, z)
        assert period == pytest.approx(demagnified_period(PERIOD, radius, z), rel=1e-3)

    def test_diverging_beam_magnifies(self, interferometer, grating):
        beam = GSMBeam(width=8e-6, radius=-0.5)
        z = revival_plane(2, interferometer.wavelength, PERIOD, -0.5)
        expected = demagnified_period(PERIOD, -0.5, z)
        assert expected > PERIOD
        assert interferometer.revival_period(beam, grating, z) == pytest.approx(expected, rel=1e-3)

    def test_no_revival_at_a_quarter_talbot_distance(self, interferometer, test_beam, grating, talbot):
        with pytest.raises(NoRevivalFound):
            interferometer.revival_period(test_beam, grating, talbot / 4)


class TestFarFieldSeries:
    def test_flux_after_g2_reaches_the_detector(self, interferometer, test_beam, grating, talbot):
        frame = interferometer.farfield_series(
            test_beam, grating, grating, talbot, [0.0], 1.0, fresnel=False
        )[0]
        flux = interferometer.total_flux(test_beam, grating, talbot, grating, 0.0)
        assert frame.total == pytest.approx(flux, rel=1e-9)
        assert frame.shift == 0.0

    def test_frames_repeat_after_one_period(self, interferometer, test_beam, grating, talbot):
        first, second = interferometer.farfield_series(
            test_beam, grating, grating, talbot, [0.0, PERIOD], 1.0
        )
        assert_allclose(first.intensity, second.intensity, rtol=1e-9, atol=1e-12 * first.intensity.max())

    def test_demag_series_needs_curvature(self, interferometer, test_beam, grating, talbot):
        with pytest.raises(DomainError):
            interferometer.demag_farfield_series(test_beam, grating, grating, talbot, [0.0], 1.0)

    def test_order_intensities_split_the_frame(self, interferometer, test_beam, grating, talbot):
        frame = interferometer.farfield_series(test_beam, grating, grating, talbot, [0.0], 1.0)[0]
        orders = Interferometer.order_intensities(frame, PERIOD, 1.0, interferometer.wavelength)
        assert sorted(orders) == [-2, -1, 0, 1, 2]
        assert orders[0] > orders[1] > 0
        assert orders[1] == pytest.approx(orders[-1], rel=0.05)

    def test_phase_map_needs_three_frames(self, interferometer, test_beam, grating, talbot):
        frames = interferometer.farfield_series(test_beam, grating, grating, talbot, [0.0, 50e-9], 1.0)
        with pytest.raises(InsufficientFrames):
            Interferometer.moire_phase_map(frames, PERIOD, (-1e-5, 1e-5))

    def test_shifts_cover_one_period(self):
        assert_allclose(shifts_over_period(PERIOD, 4), [0.0, 25e-9, 50e-9, 75e-9])
        with pytest.raises(InsufficientFrames):
            shifts_over_period(PERIOD, 1)


@pytest.mark.slow
class TestDemagnifiedTalbot:
    """Converging 2 keV beam on the full-size grid."""

    RADIUS = 2.15

    @pytest.fixture(scope="class")
    def setup(self):
        wavelength = de_broglie_wavelength(BeamEnergy(2.0))
        context = SimulationContext.from_preset("paper", wavelength)
        return Interferometer(context), talbot_distance(PERIOD, wavelength)

    def test_beat_null_moves_with_the_shift(self, setup):
        interferometer, talbot = setup
        beam = GSMBeam(radius=self.RADIUS)
        shifts = shifts_over_period(PERIOD, 8)
        frames = [
            frame.rebin(5e-6)
            for frame in interferometer.demag_farfield_series(
                beam, GratingSpec(), GratingSpec(), talbot, shifts, 1.0
            )
        ]
        coordinates, phase = Interferometer.moire_phase_map(frames, PERIOD, (-30e-6, 30e-6))
        steps = np.diff(phase)
        assert np.all(steps > 0) or np.all(steps < 0)
        beat = PERIOD * (self.RADIUS - talbot) / talbot
        magnification = (self.RADIUS - 1.0) / self.RADIUS
        slope = np.polyfit(coordinates, phase, 1)[0]
        assert abs(slope) == pytest.approx(2 * math.pi / (beat * magnification), rel=0.3)

    def test_slit_phase_favours_the_negative_orders(self, setup):
        interferometer, talbot = setup
        beta = calibrate_beta(GratingSpec(), 1.5)
        grating = GratingSpec(phase=SlitPhaseModel.from_strength(beta))
        frames = interferometer.demag_farfield_series(
            GSMBeam(radius=self.RADIUS), grating, grating, talbot, shifts_over_period(PERIOD, 4), 1.0
        )
        for frame in frames:
            orders = Interferometer.order_intensities(frame, PERIOD, 1.0, interferometer.wavelength)
            assert orders[-1] + orders[-2] > orders[1] + orders[2]
