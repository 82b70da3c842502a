"""The twelve acceptance criteria at their pinned tolerances, one test each.

Each test prints its verdict line; the full set is repeated in the
"acceptance criteria" section at the end of the pytest report.
"""

import pytest

from chebolab import acceptance

from conftest import ACCEPTANCE_LINES

CFG = acceptance.AcceptanceConfig()


@pytest.fixture(scope="module")
def data():
    CFG.validate()
    return acceptance.Datasets(CFG)


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, data):
    r = acceptance.run_criterion(number, CFG, data)
    ACCEPTANCE_LINES[number] = r.line()
    print(r.line())
    assert r.status == acceptance.PASS, r.line()
