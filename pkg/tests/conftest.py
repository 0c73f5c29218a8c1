import numpy as np
import pytest

from eccmar import dgp


@pytest.fixture(scope="session")
def design_4311():
    return dgp.draw_design(4, 3, 1, 1, seed=7)


@pytest.fixture(scope="session")
def series_4311(design_4311):
    return dgp.simulate(design_4311, 500, seed=11)


@pytest.fixture(scope="session")
def design_4322():
    return dgp.draw_design(4, 3, 2, 2, seed=19)


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
