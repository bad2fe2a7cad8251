"""Test-session plumbing.

The acceptance tests push one verdict line each through the
`criterion_report` fixture; the lines are replayed after the run in a
terminal section so they stay visible even though pytest captures
stdout during the tests themselves.
"""

import pytest

_CRITERION_LINES: list[str] = []


@pytest.fixture
def criterion_report():
    def emit(line: str) -> None:
        _CRITERION_LINES.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
