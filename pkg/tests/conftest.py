"""Shared fixtures and the acceptance-criteria report hook."""

from __future__ import annotations

import pytest

from clusterchain.params import DeviceParams, derive_constants

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def device() -> DeviceParams:
    """The built-in reference device."""
    return DeviceParams()


@pytest.fixture(scope="session")
def consts(device):
    return derive_constants(device)


@pytest.fixture(scope="session")
def acceptance_report():
    """Recorder for one-line acceptance verdicts, echoed after the run."""

    def record(criterion: int, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"criterion {criterion}: {status} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[-1])):
        terminalreporter.write_line(line)
