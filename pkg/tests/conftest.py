
import pytest

from resource_classes.data_models.beam import GSMBeam
from resource_classes.data_models.context import SimulationContext
from resource_classes.data_models.grating import GratingSpec
from resource_classes.data_models.physics import BeamEnergy
from resource_classes.data_models.wavefield import TransverseGrid
from resource_classes.services.physics import de_broglie_wavelength, talbot_distance


@pytest.fixture(scope="session")
def wavelength():
    """2.8 keV electrons"""
    return de_broglie_wavelength(BeamEnergy(2.8))


@pytest.fixture(scope="session")
def talbot(wavelength):
    return talbot_distance(100e-9, wavelength)


@pytest.fixture
def grating():
    return GratingSpec()


@pytest.fixture(scope="session")
def commensurate_grid():
    """12.8 µm window, 32 samples per 100 nm period."""
    return TransverseGrid(window=12.8e-6, n=4096)


@pytest.fixture(scope="session")
def wide_commensurate_grid():
    """51.2 µm window, 32 samples per 100 nm period."""
    return TransverseGrid(window=51.2e-6, n=16384)


@pytest.fixture
def test_context(wavelength):
    return SimulationContext.from_preset("test", wavelength)


@pytest.fixture
def test_beam():
    return GSMBeam(width=8e-6)


@pytest.fixture
def coherent_context(wavelength, wide_commensurate_grid):
    return SimulationContext(grid=wide_commensurate_grid, wavelength=wavelength, members=1)


@pytest.fixture
def wide_beam():
    """25 µm beam for the 51.2 µm commensurate window."""
    return GSMBeam(width=25e-6)
