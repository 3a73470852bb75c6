import random

import pytest

from levelpoints.varieties import PolynomialFamily


@pytest.fixture
def det2():
    return PolynomialFamily.determinant(2)


@pytest.fixture
def pff2():
    return PolynomialFamily.pfaffian(2)


@pytest.fixture
def quad22():
    # x1^2 + x2^2 - x3^2 - x4^2
    return PolynomialFamily.quadratic(2, 2, [1, 0, 0, 0, 1, 0, 0, -1, 0, -1])


def random_skew(rng, size, lo=-9, hi=9):
    M = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            v = rng.randint(lo, hi)
            M[i][j], M[j][i] = v, -v
    return M


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
