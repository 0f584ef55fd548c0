import pytest

from bcbergman.hilbert import InnerProductSpace
from bcbergman.quadrature import UNIT_BIDISK

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def bidisk_space():
    return InnerProductSpace.build(UNIT_BIDISK, 40)


@pytest.fixture(scope="session")
def bidisk_space_60():
    return InnerProductSpace.build(UNIT_BIDISK, 60)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.rstrip("abc")), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
