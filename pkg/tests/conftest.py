import numpy as np
import pytest

from carbonlab.equilibria import all_equilibria
from carbonlab.model import BASELINE, compute_bounds


@pytest.fixture(scope="session")
def baseline():
    return BASELINE


@pytest.fixture(scope="session")
def bounds():
    return compute_bounds(BASELINE)


@pytest.fixture(scope="session")
def equilibria_baseline():
    return all_equilibria(BASELINE)


@pytest.fixture(scope="session")
def e4(equilibria_baseline):
    return equilibria_baseline[3]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
