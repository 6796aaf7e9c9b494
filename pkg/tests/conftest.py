"""Shared test plumbing: the acceptance-criterion summary section.

Acceptance tests record one line per criterion through
:func:`record_criterion`; the terminal summary prints them after the
run so every criterion's pass/fail state is visible in the log.
"""

from __future__ import annotations

_CRITERIA: dict[int, tuple[str, bool]] = {}


def record_criterion(number: int, label: str, ok: bool) -> None:
    _CRITERIA[number] = (label, ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, ok = _CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({label}): {status}")
