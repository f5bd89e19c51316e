import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from resource_classes import ConfigurationError, DomainError
from resource_classes.data_models.beam import Ensemble, GSMBeam
from resource_classes.data_models.context import SimulationContext
from resource_classes.data_models.grating import GratingSpec
from resource_classes.data_models.physics import ScanSpec
from resource_classes.data_models.wavefield import WaveField
from resource_classes.services.coherence import (
    gsm_ensemble,
    incoherent_intensity,
    map_members,
    tilt_angles,
)
from resource_classes.services.interferometer import Interferometer


class TestEnsemble:
    def test_single_member_is_coherent(self, test_context, test_beam):
        ensemble = gsm_ensemble(test_beam, test_context.grid, test_context.wavelength, 1)
        assert len(ensemble) == 1
        assert ensemble.weights == [1.0]

    @pytest.mark.parametrize("m", [3, 7, 15])
    def test_weights_and_member_flux(self, test_context, test_beam, m):
        ensemble = gsm_ensemble(test_beam, test_context.grid, test_context.wavelength, m)
        assert len(ensemble) == m
        assert math.fsum(ensemble.weights) == pytest.approx(1.0, abs=1e-12)
        for member in ensemble.fields:
            assert member.flux == pytest.approx(1.0, rel=1e-9)

    def test_weights_are_symmetric_and_centred(self, test_beam, wavelength):
        angles, weights = tilt_angles(test_beam, wavelength, 7)
        assert_allclose(angles, -angles[::-1], atol=1e-20)
        assert_allclose(weights, weights[::-1], rtol=1e-12)
        assert np.argmax(weights) == 3

    def test_tilts_span_two_sigma(self, test_beam, wavelength):
        angles, _ = tilt_angles(test_beam, wavelength, 15)
        sigma = wavelength.metres / (2.0 * math.pi * test_beam.coherence_width)
        assert angles[-1] == pytest.approx(2.0 * sigma)

    @pytest.mark.parametrize("m", [7, 15])
    def test_tilt_variance_matches_the_truncated_gaussian(self, test_beam, wavelength, m):
        angles, weights = tilt_angles(test_beam, wavelength, m)
        sigma = wavelength.metres / (2.0 * math.pi * test_beam.coherence_width)
        inside = math.erf(2.0 / math.sqrt(2.0))
        density_at_edge = math.exp(-2.0) / math.sqrt(2.0 * math.pi)
        truncated = 1.0 - 4.0 * density_at_edge / inside
        assert np.sum(weights * angles**2) / sigma**2 == pytest.approx(truncated, rel=0.01)

    @pytest.mark.parametrize("m", [0, 4])
    def test_tilt_grid_needs_an_odd_count(self, test_beam, wavelength, m):
        with pytest.raises(ConfigurationError):
            tilt_angles(test_beam, wavelength, m)

    @pytest.mark.parametrize("m", [0, 2, 8])
    def test_rejects_even_or_empty_ensembles(self, test_context, test_beam, m):
        with pytest.raises(ConfigurationError):
            gsm_ensemble(test_beam, test_context.grid, test_context.wavelength, m)

    def test_rejects_window_narrower_than_twice_the_beam(self, test_context):
        with pytest.raises(ConfigurationError):
            gsm_ensemble(GSMBeam(width=12e-6), test_context.grid, test_context.wavelength, 7)

    def test_ensemble_validation(self, commensurate_grid, wavelength):
        field = WaveField(
            grid=commensurate_grid, amplitudes=np.ones(commensurate_grid.n), wavelength=wavelength
        )
        with pytest.raises(ConfigurationError):
            Ensemble(members=[])
        with pytest.raises(ConfigurationError):
            Ensemble(members=[(0.6, field), (0.6, field)])
        with pytest.raises(ConfigurationError):
            Ensemble(members=[(1.5, field), (-0.5, field)])

    @pytest.mark.parametrize("width", [0.0, -1e-6])
    def test_beam_rejects_non_positive_widths(self, width):
        with pytest.raises(DomainError):
            GSMBeam(width=width)
        with pytest.raises(DomainError):
            GSMBeam(coherence_width=width)


class TestIncoherentIntensity:
    def test_single_member_is_identity(self):
        intensity = np.linspace(0.0, 1.0, 11)
        assert_allclose(incoherent_intensity([(1.0, intensity)]), intensity)

    def test_sums_intensities_not_amplitudes(self, commensurate_grid):
        x = commensurate_grid.x
        first = np.exp(-(((x - 20e-9) / 10e-9) ** 2)).astype(complex)
        second = np.exp(-(((x + 20e-9) / 10e-9) ** 2)) * np.exp(1j * 2e8 * x)
        mixed = incoherent_intensity([(0.5, np.abs(first) ** 2), (0.5, np.abs(second) ** 2)])
        assert_allclose(mixed, 0.5 * (np.abs(first) ** 2 + np.abs(second) ** 2))
        coherent = 0.5 * np.abs(first + second) ** 2
        assert not np.allclose(mixed, coherent)

    def test_is_a_convex_combination(self):
        low, high = np.full(5, 1.0), np.full(5, 3.0)
        assert_allclose(incoherent_intensity([(0.25, low), (0.75, high)]), 2.5)

    def test_rejects_mismatched_shapes(self):
        with pytest.raises(ConfigurationError):
            incoherent_intensity([(0.5, np.ones(4)), (0.5, np.ones(5))])

    def test_rejects_empty_input(self):
        with pytest.raises(ConfigurationError):
            incoherent_intensity([])


class TestMapMembers:
    @pytest.mark.parametrize("threads", [1, 4])
    def test_results_keep_input_order(self, threads):
        assert map_members(lambda value: value**2, range(20), threads) == [v**2 for v in range(20)]


class TestPartialCoherence:
    def _contrast(self, wavelength, talbot, coherence_width, members):
        context = SimulationContext.from_preset("test", wavelength)
        context = SimulationContext(grid=context.grid, wavelength=wavelength, members=members)
        beam = GSMBeam(width=8e-6, coherence_width=coherence_width)
        shifts = 100e-9 * np.arange(20) / 20
        curve = Interferometer(context).moire_scan(beam, GratingSpec(), GratingSpec(), talbot, shifts)
        return curve.contrast

    def test_two_micron_coherence_keeps_the_fringes(self, wavelength, talbot):
        assert self._contrast(wavelength, talbot, 2e-6, 15) > 0.9

    def test_short_coherence_washes_out_the_fringes(self, wavelength, talbot):
        long = self._contrast(wavelength, talbot, 2e-6, 15)
        short = self._contrast(wavelength, talbot, 0.2e-6, 15)
        assert short < long
        assert short < 0.85

    def test_carpet_converges_in_the_member_count(self, wavelength, talbot):
        scan = ScanSpec(z_min=0.8 * talbot, z_max=1.2 * talbot, z_step=0.1 * talbot, x_count=40)
        beam = GSMBeam(width=8e-6)
        carpets = []
        for members in (7, 15):
            base = SimulationContext.from_preset("test", wavelength)
            context = SimulationContext(grid=base.grid, wavelength=wavelength, members=members)
            carpets.append(
                Interferometer(context).talbot_carpet(beam, GratingSpec(), GratingSpec(), scan).flux
            )
        change = np.abs(carpets[1] - carpets[0]) / carpets[0]
        assert change.max() < 0.01
