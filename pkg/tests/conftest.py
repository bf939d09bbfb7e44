from __future__ import annotations

import pytest

_VERDICTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Record ``(passed, summary)`` for an acceptance criterion."""

    def record(number: int, passed: bool, summary: str) -> None:
        _VERDICTS[number] = (bool(passed), summary)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {summary}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        passed, summary = _VERDICTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'} - {summary}")
