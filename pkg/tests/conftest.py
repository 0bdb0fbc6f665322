"""Shared test infrastructure: the acceptance criterion report.

Acceptance tests append one line per criterion; the hook below prints
them as a summary section so the pass/fail record is visible in the
normal captured-output run.
"""

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report() -> list[str]:
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
