import pytest

from diskmap import weight
from diskmap.solver import SolveOptions, solve


@pytest.fixture(scope="session")
def staircase():
    return weight.staircase_field()


@pytest.fixture(scope="session")
def maximal_report(staircase):
    """Converged solve onto the largest scaled-identity solution 6z."""
    return solve(staircase, options=SolveOptions(initial_map=6.5))


@pytest.fixture(scope="session")
def branched_report(staircase):
    """Converged solve onto z^2 + z with the prescribed critical point."""
    return solve(staircase, zeros=[-0.5], options=SolveOptions(initial_map=1.0))
