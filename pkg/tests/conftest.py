import pytest

from lamtorus import ModelParams, find_delta_star

_CRITERIA = {}


@pytest.fixture
def record_criterion():
    """Record one acceptance line; all lines are echoed in the terminal summary."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])


@pytest.fixture(scope="session")
def torus_n2():
    """Solved lambda-torus for n = 2, lambda = 1 at default settings."""
    return find_delta_star(ModelParams(2, 1.0))
