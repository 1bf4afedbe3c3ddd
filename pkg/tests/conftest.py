import pytest
from hypothesis import HealthCheck, settings

from rpi_meter.units import AlphaMode, UnitKind, constants

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def natural():
    return constants(UnitKind.NATURAL, AlphaMode.PAPER_EXACT)


@pytest.fixture(scope="session")
def cgs():
    return constants(UnitKind.GAUSSIAN_CGS, AlphaMode.CODATA)
