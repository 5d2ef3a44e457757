import numpy as np
import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(label: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((label, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
