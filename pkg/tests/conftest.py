"""Shared fixtures: catalog complexes, solved patterns, a seeded RNG."""

import math

import numpy as np
import pytest

from katsphere.angles import AngleAssignment
from katsphere.catalog import bipyramid, icosahedron, octahedron, stacked_tetrahedra
from katsphere.solver import solve


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)


@pytest.fixture(scope="session")
def oct_tri():
    return octahedron()


@pytest.fixture(scope="session")
def ico_tri():
    return icosahedron()


@pytest.fixture(scope="session")
def bp3():
    return bipyramid(3)


@pytest.fixture(scope="session")
def bp4():
    return bipyramid(4)


@pytest.fixture(scope="session")
def bp5():
    return bipyramid(5)


@pytest.fixture(scope="session")
def stacked2():
    return stacked_tetrahedra(2)


@pytest.fixture(scope="session")
def solved_oct(oct_tri):
    theta = AngleAssignment.constant(oct_tri, 2.0 * math.pi / 5.0)
    cfg, rep = solve(oct_tri, theta)
    assert rep.converged
    return cfg, theta


@pytest.fixture(scope="session")
def solved_bp3(bp3):
    theta = AngleAssignment({e: (0.3 if e[1] < 3 else 1.5) for e in bp3.edges})
    cfg, rep = solve(bp3, theta)
    assert rep.converged
    return cfg, theta


@pytest.fixture(scope="session")
def solved_ico(ico_tri):
    theta = AngleAssignment.constant(ico_tri, 0.45 * math.pi)
    cfg, rep = solve(ico_tri, theta)
    assert rep.converged
    return cfg, theta
