import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gallery.geom import validate_polygon  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def square():
    return validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def lshape():
    return validate_polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


@pytest.fixture
def deep_notch():
    return validate_polygon([(0, 0), (3, 0), (3, 1), (1, 1), (1, 3), (0, 3)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
