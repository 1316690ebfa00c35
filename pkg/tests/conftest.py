import numpy as np
import pytest
from hypothesis import settings

from heisenspec.kernels import build_kernel

# first calls pay numba compilation, which has nothing to do with correctness
settings.register_profile("heisenspec", deadline=None)
settings.load_profile("heisenspec")


@pytest.fixture(scope="session")
def unit_kernel():
    return build_kernel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
