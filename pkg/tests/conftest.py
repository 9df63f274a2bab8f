import pytest

from vertexlab.scalar import param

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def lam():
    return param("lam")


@pytest.fixture
def record():
    """Record a one-line acceptance verdict that is echoed in the terminal summary."""

    def _record(criterion: str, passed: bool, detail: str = ""):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
