import numpy as np
import pytest

from morsecontrol import I2, WavePacketModel, characteristic_times, split_even_odd, su2_coefficients

DEFAULT_NX = 2048


@pytest.fixture(scope="session")
def x_grid():
    return np.linspace(-0.25, 0.45, DEFAULT_NX)


@pytest.fixture(scope="session")
def coeffs():
    return split_even_odd(su2_coefficients(2.0, 23))


@pytest.fixture(scope="session")
def model(x_grid, coeffs):
    return WavePacketModel(I2, coeffs, x_grid)


@pytest.fixture(scope="session")
def times():
    t_cl, t_rev = characteristic_times(I2)
    return t_cl, t_rev
