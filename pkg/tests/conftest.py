import sys
from math import pi

import pytest

from diracpos.fock import ModeTable, build_space


@pytest.fixture(scope="session")
def table1():
    return ModeTable(20 * pi, 1, 1.0)


@pytest.fixture(scope="session")
def space1(table1):
    return build_space(table1)


@pytest.fixture(scope="session")
def space0():
    return build_space(ModeTable(20 * pi, 0, 1.0))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
