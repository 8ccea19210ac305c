"""Shared pytest wiring.

The acceptance tests record one result line per criterion; the hook below
echoes them in a dedicated section after the run, outside output capture,
so the lines are visible in a plain ``pytest`` invocation.
"""

import pytest

_CRITERION_LINES = []


@pytest.fixture(scope="session")
def criterion_log():
    """Callable that records one acceptance-criterion result line."""
    return _CRITERION_LINES.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
