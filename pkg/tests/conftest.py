import pytest

from fermi_ee import boundary as B
from fermi_ee.thermodynamics import IdealGas


@pytest.fixture(scope="session")
def gas1():
    return IdealGas(d=1)


@pytest.fixture(scope="session")
def unit_interval():
    return B.Domain.intervals((0.0, 1.0))
