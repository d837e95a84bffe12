"""Shared fixtures: solvable reference models and their default grids."""

import numpy as np
import pytest

from susyqm.numerics import Grid1D, SampledFunction, offset_grid
from susyqm.periodic import LameParams, lame_cell_grid, lame_model
from susyqm.poschl_teller import PTParams, pt_grid, pt_model
from susyqm.susy import PotentialModel


@pytest.fixture(scope="session")
def pt34():
    return PTParams(lam=3.0, nu=4.0)


@pytest.fixture(scope="session")
def pt58():
    return PTParams(lam=5.0, nu=8.0)


@pytest.fixture(scope="session")
def pt34_model(pt34):
    return pt_model(pt34)


@pytest.fixture(scope="session")
def pt58_model(pt58):
    return pt_model(pt58)


@pytest.fixture(scope="session")
def pt_default_grid():
    return pt_grid()


@pytest.fixture(scope="session")
def lame_half():
    return LameParams(m=0.5)


@pytest.fixture(scope="session")
def lame_half_model(lame_half):
    return lame_model(lame_half)


@pytest.fixture(scope="session")
def lame_grid16(lame_half):
    return lame_cell_grid(lame_half, n_cells_per_side=16)


@pytest.fixture(scope="session")
def oscillator_model():
    return PotentialModel(potential=lambda x: 0.5 * np.asarray(x) ** 2,
                          domain=(-8.0, 8.0),
                          kind="bound",
                          analytic_spectrum=lambda n: n + 0.5,
                          label="harmonic oscillator")


def oscillator_ground_seed(grid: Grid1D):
    """Analytic ground state exp(-x^2/2) with exact derivatives."""
    x = grid.points()
    values = np.exp(-x ** 2 / 2.0)
    return SampledFunction(grid, values, -x * values)


@pytest.fixture(scope="session")
def oscillator_grid():
    return offset_grid(-8.0, 8.0, 2001)
