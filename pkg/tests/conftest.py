import pytest

_LINES: list[str] = []


@pytest.fixture
def record():
    """Print and keep one status line per acceptance criterion."""

    def _record(number: int, name: str, ok: bool, runtime: float, limit: float, detail: str = ""):
        status = "PASS" if ok and runtime < limit else "FAIL"
        line = f"criterion {number} {name}: {status} ({runtime:.1f} s, limit {limit:g} s) {detail}"
        print(line)
        _LINES.append(line)
        return status == "PASS"

    return _record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
