import numpy as np
import pytest

from snls.grid import FieldState, GridSpec
from snls.ground_state import solve_ground_state
from snls.initial_data import ground_state_field


@pytest.fixture(scope="session")
def gs_1d_s2():
    return solve_ground_state(1, 2.0)


@pytest.fixture(scope="session")
def gs_1d_s3():
    return solve_ground_state(1, 3.0)


@pytest.fixture(scope="session")
def gs_2d_cubic():
    return solve_ground_state(2, 1.0)


@pytest.fixture(scope="session")
def gs_3d_cubic():
    return solve_ground_state(3, 1.0)


@pytest.fixture()
def grid_1d():
    return GridSpec(1, 40.0, 512)


@pytest.fixture()
def q_field(gs_1d_s2, grid_1d):
    return ground_state_field(gs_1d_s2, grid_1d)


def random_smooth_field(grid, rng, n_modes=5, envelope_width=3.0):
    """Band-limited random field with a localizing envelope (shared helper)."""
    vals = np.zeros(grid.shape, dtype=complex)
    for _ in range(n_modes):
        k = rng.integers(-5, 6, size=grid.dim)
        amp = rng.normal() + 1j * rng.normal()
        phase = np.zeros(grid.shape)
        for ki, x, L in zip(k, grid.coords, grid.extent):
            phase = phase + 2 * np.pi * ki / L * x
        vals += amp * np.exp(1j * phase)
    vals *= np.exp(-grid.radius_sq / (2 * envelope_width**2))
    return FieldState(grid, vals)
