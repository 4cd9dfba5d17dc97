"""Shared fixtures: the unit-step worked example and a mid-resolution grid.

The step potential V = 1 on (0, 1) with the Robin angle arctan(coth 1) is the
exceptional-case touchstone used throughout the suite; closed forms for its
Jost solution are frozen in test modules and re-derived in oracles.py.
"""

import numpy as np
import pytest

from scatterkit.boundary import BoundaryPair
from scatterkit.grids import KXGrid
from scatterkit.jost import jost_matrix, marchenko_kernel, solve_faddeev
from scatterkit.potentials import PotentialSpec, box_potential

# arctan(coth 1): the Robin angle making J(0) = 0 for the unit step
GOLDEN_THETA = 0.9199161587718891


@pytest.fixture(scope="session")
def golden_potential():
    return box_potential(1.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def golden_boundary():
    return BoundaryPair.robin(GOLDEN_THETA)


@pytest.fixture(scope="session")
def matrix_potential():
    """A 2x2 Hermitian (complex) two-cell potential for cross-checks."""
    cells = [
        (0.0, 1.0, np.array([[1.0, 0.5j], [-0.5j, 2.0]])),
        (1.0, 2.0, np.array([[-0.3, 0.0], [0.0, 0.4]])),
    ]
    return PotentialSpec.from_cells(2, cells)


@pytest.fixture(scope="session")
def medium_grid():
    return KXGrid.build(kmax=40.0, nk=2048, dx=1.0 / 128.0, xmax=8.0)


@pytest.fixture(scope="session")
def golden_table(golden_potential, medium_grid, golden_boundary):
    jt = solve_faddeev(golden_potential, medium_grid)
    return jost_matrix(jt, golden_boundary)


@pytest.fixture(scope="session")
def golden_kernel(golden_table):
    return marchenko_kernel(golden_table)


@pytest.fixture(scope="session")
def golden_scatter(golden_potential, golden_boundary):
    """Full scattering pipeline for the unit-step example on a wide window
    (the transforms need more room than ``medium_grid`` provides)."""
    from scatterkit.scattering import scattering_table

    grid = KXGrid.build(kmax=40.0, nk=2048, dx=1.0 / 128.0, xmax=16.0)
    jt = jost_matrix(solve_faddeev(golden_potential, grid), golden_boundary)
    return jt, scattering_table(jt)
