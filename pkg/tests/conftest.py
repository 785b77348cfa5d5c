import numpy as np
import pytest

from activesense.env import ProcessConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cfg3():
    return ProcessConfig(N=3, p=0.2, c=0.2, q=0.8, rho=0.0, dep_pair=(1, 2))
