import numpy as np
import pytest

from stefan_kinetic.core import Grid1D, make_params
from stefan_kinetic.scenarios import get_scenario

UNIT = dict(rho0=1.0, gamma=1.0, alpha=1.0, K=1.0, L=1.0)


@pytest.fixture(scope="session")
def baseline_params():
    return make_params(dict(UNIT, theta_T=2.0, theta_B=1.0))


@pytest.fixture(scope="session")
def baseline_result():
    return get_scenario("exit-baseline").run(n_cells=512)


@pytest.fixture(scope="session")
def mirrored_result():
    return get_scenario("mirrored").run(n_cells=512)


@pytest.fixture(scope="session")
def equilibrium_result():
    return get_scenario("equilibrium").run()


@pytest.fixture
def grid64():
    return Grid1D(64, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
