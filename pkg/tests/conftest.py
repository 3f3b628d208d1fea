import numpy as np
import pytest

from pegfinder import corpus

_ACCEPTANCE_LINES = []


def record_criterion(number, name, passed, detail=""):
    line = f"[acceptance] C{number:<2d} {name}: {'PASS' if passed else 'FAIL'}  {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def circle():
    return corpus("circle")


@pytest.fixture(scope="session")
def ellipse():
    return corpus("ellipse", a=2, b=1)


@pytest.fixture(scope="session")
def trefoil():
    return corpus("trefoil")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
