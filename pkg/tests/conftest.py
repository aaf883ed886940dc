import math
from pathlib import Path

import numpy as np
import pytest

from qes.applications.phi6 import phi6_spec
from qes.applications.two_electron import TwoElectronParams
from qes.models import OdeSpec, SolverConfig

FIXTURES = Path(__file__).parent / "fixtures"
SQRT2 = math.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cfg():
    return SolverConfig(restarts=150, seed=7)


@pytest.fixture
def phi6_n2():
    """X = z^4 + z^2 - 2, Y = 8z - 5z^3: roots +-sqrt(2), Z = 8z^2 - 2."""
    return phi6_spec(2.0, 2)


@pytest.fixture
def two_electron_n2():
    return TwoElectronParams(delta=2.0, gamma=1.0, n=2).spec()


@pytest.fixture
def dependent_n2():
    """a4 = 1, b3 = -2(n-1) a4 with b1 != 0."""
    return OdeSpec(a=(0.5, -1.0, 0.3, 0.2, 1.0), b=(0.1, 1.5, 0.7, -2.0), n=2)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
