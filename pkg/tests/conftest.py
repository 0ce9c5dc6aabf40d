import numpy as np
import pytest

from deltasum.analytic.bump import canonical_bump


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture(scope="session")
def unit_bump():
    return canonical_bump(1.0, 2.0)


@pytest.fixture(scope="session")
def window_bump():
    # the [10^3, 2*10^3] test window shared by the dual-sum identity checks
    return canonical_bump(1.0e3, 2.0e3)
