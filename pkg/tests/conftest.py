import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nucent.nuclear_response import SampleParams, TimeGrid  # noqa: E402


@pytest.fixture
def fig1e():
    return SampleParams()


@pytest.fixture
def grid():
    return TimeGrid()


@pytest.fixture
def coarse_grid():
    return TimeGrid(0.0, 1410.0, 0.05)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
