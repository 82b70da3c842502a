import pytest
from hypothesis import HealthCheck, settings

from chebolab import fingroup, grouplib

settings.register_profile("lab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


@pytest.fixture(scope="session")
def s3():
    return grouplib.symmetric(3)


@pytest.fixture(scope="session")
def a4_quotient():
    """(Z/2)^2 x| Z/3 from the cat matrix, with its quotient map."""
    return fingroup.semidirect_quotient(2, ((2, 1), (1, 1)))


@pytest.fixture(scope="session")
def lib():
    return grouplib.library()


# acceptance verdict lines, filled by test_acceptance.py and echoed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
