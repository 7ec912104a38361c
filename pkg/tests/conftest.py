import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from biwalk.graphs import from_edge_list  # noqa: E402

import golden  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ex8():
    return from_edge_list(golden.EX8_PART_A, golden.EX8_PART_B, golden.EX8_EDGES, name="ex8")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
