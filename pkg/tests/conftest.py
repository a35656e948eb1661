import numpy as np
import pytest

from monored.grid import GridDomain


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square3():
    return GridDomain.cube(3, 2)
