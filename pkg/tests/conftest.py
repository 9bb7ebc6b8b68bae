from fractions import Fraction

import pytest

from randmaps.hypotheses import StochasticSystem, example22_maps, example22_system
from randmaps.pwlin import affine

import acceptance_log


@pytest.fixture(scope="session")
def phis():
    return example22_maps()


@pytest.fixture(scope="session")
def ex22():
    return example22_system(Fraction(2, 5))


@pytest.fixture(scope="session")
def halving():
    """Single-map system ``x -> x/2``."""
    return StochasticSystem((affine(Fraction(1, 2), 0),), (1,), ("half",))


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.lines():
            terminalreporter.write_line(line)
