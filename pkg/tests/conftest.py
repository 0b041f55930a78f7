import pytest

_LINES = []


@pytest.fixture
def record():
    """Log one acceptance verdict line; returns ``ok`` so tests can assert on it."""

    def _record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
