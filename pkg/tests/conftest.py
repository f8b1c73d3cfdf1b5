import numpy as np
import pytest

from wellscape import make_grid


@pytest.fixture
def grid64():
    return make_grid(1.0, 64, 64)


@pytest.fixture
def grid128():
    return make_grid(1.0, 128, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)
