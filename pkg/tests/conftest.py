import random
from pathlib import Path

import pytest

from src.workers.curve_resolver import PuiseuxBranch, resolve
from src.workers.resolution_graph import Component, ResolutionGraph

JOBS_DIR = Path(__file__).resolve().parents[1] / "data" / "jobs"


def branch(name, n, *y_terms, swapped=False):
    return PuiseuxBranch(name, n, tuple((e, c) for e, c in y_terms), swapped)


@pytest.fixture
def jobs_dir():
    return JOBS_DIR


@pytest.fixture
def cusp():
    return branch("C", 2, (3, 1))


@pytest.fixture
def line_x():
    """y = 0, tangent to the cusp."""
    return branch("L", 1)


@pytest.fixture
def line_y():
    """x = 0, transverse to the cusp."""
    return branch("L", 1, swapped=True)


@pytest.fixture
def cusp_rc(cusp):
    return resolve([cusp])


@pytest.fixture
def cusp_line_rc(cusp, line_y):
    return resolve([cusp, line_y])


@pytest.fixture
def hopf_rc():
    return resolve([branch("L1", 1), branch("L2", 1, swapped=True)])


@pytest.fixture
def a1_graph():
    return ResolutionGraph((Component("E1", -2),))


@pytest.fixture
def a2_graph():
    return ResolutionGraph((Component("E1", -2), Component("E2", -2)), (("E1", "E2"),))


@pytest.fixture
def e8_graph():
    comps = tuple(Component(f"E{i}", -2) for i in range(1, 9))
    edges = (("E1", "E2"), ("E2", "E3"), ("E3", "E4"), ("E4", "E5"),
             ("E5", "E6"), ("E6", "E7"), ("E3", "E8"))
    z = {"E1": 2, "E2": 4, "E3": 6, "E4": 5, "E5": 4, "E6": 3, "E7": 2, "E8": 3}
    return ResolutionGraph(comps, edges, (), {"maximal": z})


@pytest.fixture
def rng():
    return random.Random(20240607)
