import numpy as np
import pytest

from diamondcavity.stacks import default_coating


@pytest.fixture(scope="session")
def coating():
    return default_coating()


@pytest.fixture
def rng():
    return np.random.default_rng(20240737)
