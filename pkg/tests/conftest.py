import numpy as np
import pytest

from specroute.rng import Xoshiro256


@pytest.fixture
def rng():
    return Xoshiro256(12345)


@pytest.fixture
def nprng():
    return np.random.default_rng(2024)
