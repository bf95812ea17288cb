import pytest

from qhoprice import finite_oscillator as fo


@pytest.fixture(scope="session")
def oscillators():
    """Diagonalized finite oscillators, built once per size."""
    cache = {}

    def get(d):
        if d not in cache:
            cache[d] = fo.diagonalize(fo.build_grid(d))
        return cache[d]

    return get


ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance():
    """Record the outcome of one acceptance criterion for the summary."""

    def record(number, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
