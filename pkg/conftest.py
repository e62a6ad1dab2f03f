import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from fractal import CantorSeed, identity_seed, koch_ifs, staircase_from_cantor  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def middle_third():
    return staircase_from_cantor(CantorSeed(2, 1.0 / 3.0), 40)


@pytest.fixture(scope="session")
def quarter_cantor():
    return staircase_from_cantor(CantorSeed(2, 0.25), 40)


@pytest.fixture(scope="session")
def identity_staircase():
    return staircase_from_cantor(identity_seed(), 40)


@pytest.fixture(scope="session")
def koch():
    return koch_ifs(math.pi / 3)
