"""Shared fixtures plus the acceptance-criteria summary printer."""

import numpy as np
import pytest

_CRITERION_LINES = {}


def record_criterion(number: int, label: str, passed: bool, detail: str = ""):
    """Register one acceptance-criterion verdict for the terminal summary."""
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:>2} [{status}] {label}"
    if detail:
        line += f" -- {detail}"
    _CRITERION_LINES[number] = line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_LINES):
        terminalreporter.write_line(_CRITERION_LINES[number])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
