import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rankone.grid import GridVector, LogGrid, default_grid

settings.register_profile("rankone", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("rankone")


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def small_grid():
    return LogGrid(-24.0, 24.0, 512)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bump(grid, center=0.0, width=0.5, coeff=1.0):
    return GridVector(grid, coeff * np.exp(-((grid.t - center) ** 2) / (2 * width**2)) + 0j)
