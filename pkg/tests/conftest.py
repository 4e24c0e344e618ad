import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cgwtree.offspring import OffspringLaw


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=["geometric", "poisson", "binary", "zeta"])
def any_law(request):
    if request.param == "zeta":
        return OffspringLaw.zeta_tail(1.5)
    return OffspringLaw(request.param)


@pytest.fixture
def geometric():
    return OffspringLaw.geometric()


@pytest.fixture
def poisson():
    return OffspringLaw.poisson()


@pytest.fixture
def binary():
    return OffspringLaw.binary()


@pytest.fixture
def zeta15():
    return OffspringLaw.zeta_tail(1.5)
