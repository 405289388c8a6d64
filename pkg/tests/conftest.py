import sys

import pytest

from mmse_disturbance.quadrature import build_grid


@pytest.fixture(scope="session")
def grid():
    return build_grid()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
