import pytest

from biphoton import experiments as ex
from biphoton.field import to_position
from biphoton.scenario import default_scenario
from biphoton.spdc import (
    DoubleGaussianParams,
    SpdcParams,
    build_double_gaussian,
    build_spdc,
    default_momentum_axis,
    double_gaussian_axis,
)

from helpers import K808

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_params():
    return SpdcParams()


@pytest.fixture(scope="session")
def source_momentum(default_params):
    return build_spdc(default_params, default_momentum_axis(default_params))


@pytest.fixture(scope="session")
def source_position(source_momentum):
    return to_position(source_momentum)


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def far_field(scenario, source_position):
    return ex.state_at(scenario, 0.5, source_position)


@pytest.fixture(scope="session")
def dg25_params():
    return DoubleGaussianParams(sigma_plus=4e3, sigma_minus=1e5)


@pytest.fixture(scope="session")
def dg25(dg25_params):
    return build_double_gaussian(dg25_params, double_gaussian_axis(dg25_params), k=K808)
