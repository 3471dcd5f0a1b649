import pytest

from arcsim import states
from arcsim.models import DimensionlessParams


@pytest.fixture(autouse=True)
def clear_photon_cache():
    states.photon_cache.clear()
    yield
    states.photon_cache.clear()


@pytest.fixture
def coherent_params():
    return DimensionlessParams(upsilon=0.01, theta=1.0, phi0=0.3, gamma0=1.0, nu0=4.0)


@pytest.fixture
def write_config(tmp_path):
    """Write run-configuration lines to a file and return its path."""

    def _write(*lines, name="run.conf"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    return _write
