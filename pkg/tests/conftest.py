import numpy as np
import pytest

from billiard_bounds.catalog import Circle, Ellipse, Ellipsoid, FourierOval
from billiard_bounds.solver import SolveSettings, find_periodic_trajectories


@pytest.fixture(scope="session")
def ellipse():
    return Ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def oval():
    return FourierOval()


@pytest.fixture(scope="session")
def ellipse_k2(ellipse):
    return find_periodic_trajectories(ellipse, 2, SolveSettings(multistart_count=200))


@pytest.fixture(scope="session")
def ellipsoid_k2():
    return find_periodic_trajectories(Ellipsoid((1.0, 2.0, 3.0)), 2, SolveSettings(multistart_count=200))


@pytest.fixture(scope="session")
def oval_k3(oval):
    return find_periodic_trajectories(oval, 3, SolveSettings(multistart_count=300))


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
