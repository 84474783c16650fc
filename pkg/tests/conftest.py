import pytest

from sgthermal.assembly import REFERENCE_GEOMETRY, REFERENCE_PROPS

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def geometry():
    return REFERENCE_GEOMETRY


@pytest.fixture
def props():
    return REFERENCE_PROPS


@pytest.fixture
def record_acceptance():
    def record(criterion, passed, detail):
        ACCEPTANCE_RESULTS[criterion] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
