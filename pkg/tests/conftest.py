import numpy as np
import pytest

from qtmirror import PacketSpec1D, gaussian_1d, make_grid


@pytest.fixture(scope="session")
def grid_1d():
    # spec-resolution 1D lattice used throughout the 1D oracle checks
    return make_grid(1, (-20.0, 44.0), 4096)


@pytest.fixture(scope="session")
def grid_1d_small():
    return make_grid(1, (-16.0, 28.0), 1024)


@pytest.fixture(scope="session")
def grid_2d_small():
    return make_grid(2, (-24.0, 24.0), 256)


@pytest.fixture(scope="session")
def packet_default(grid_1d):
    return gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


def random_state(grid, rng):
    """Normalized random complex field on a grid (test fixture helper)."""
    from qtmirror import WaveFunction

    psi = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.cell_volume)
    return WaveFunction(grid, psi, t=0.0)
