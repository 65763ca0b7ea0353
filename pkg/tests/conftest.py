import pytest

from dfactor import oracle
from dfactor.graph_core import ColoredState, cycle_pairs, load_instance


@pytest.fixture(scope="session")
def c8():
    """n=8, d=2 with the 8-cycle forbidden."""
    return load_instance(8, 2, cycle_pairs(8))


@pytest.fixture(scope="session")
def c8_bounds(c8):
    return oracle.strata_extrema(c8)


@pytest.fixture(scope="session")
def c8_support(c8):
    return oracle.enumerate_d_factors(c8)


@pytest.fixture
def c6_state():
    def make(forbidden=()):
        inst = load_instance(6, 2, forbidden)
        return ColoredState.from_edges(inst, cycle_pairs(6))
    return make


@pytest.fixture(scope="session")
def c8_states(c8):
    """Every 2-regular graph on 8 vertices, coloured by the C8 instance."""
    return [ColoredState.from_edges(c8, e) for e in oracle.enumerate_d_regular(8, 2, 10_000)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
