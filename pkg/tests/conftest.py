"""Collects the acceptance verdicts and prints them after the run."""

import pytest

_LINES: list[tuple[int, str]] = []


@pytest.fixture(scope="session")
def verdict():
    """``verdict(number, ok, detail)`` records and prints one PASS/FAIL line."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _LINES.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
