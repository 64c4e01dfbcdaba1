import functools
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from condingleton.dist import make_table
from condingleton.ingleton import circuits, functional_matrix


@st.composite
def rational_tables(draw, zeros: bool = True):
    """Random exact tables; small integer weights make CI statements occur."""
    low = 0 if zeros else 1
    weights = draw(st.lists(st.integers(low, 12), min_size=16, max_size=16))
    if not any(weights):
        weights[draw(st.integers(0, 15))] = 1
    total = sum(weights)
    return make_table([Fraction(w, total) for w in weights])


def random_table(rng, zeros: bool = True, top: int = 12):
    while True:
        w = [rng.randint(0 if zeros else 1, top) for _ in range(16)]
        if any(w):
            return make_table([Fraction(x, sum(w)) for x in w])


@functools.lru_cache(maxsize=None)
def census_circuits():
    return circuits(functional_matrix())


@pytest.fixture(scope="session")
def all_circuits():
    return census_circuits()


# acceptance results, one line per criterion, shown after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
