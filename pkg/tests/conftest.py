import contextlib

import pytest

_CRITERIA: list[tuple[str, bool, str]] = []


class Criterion:
    def __init__(self, name):
        self.name = name
        self.detail = ""


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the summary."""

    @contextlib.contextmanager
    def _criterion(name):
        c = Criterion(name)
        try:
            yield c
        except BaseException:
            _CRITERIA.append((name, False, c.detail))
            raise
        _CRITERIA.append((name, True, c.detail))

    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else ""))
