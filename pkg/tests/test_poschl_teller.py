"""Trigonometric Poschl-Teller seeds, connection constants and w-integrals.

Frozen reference values were computed with mpmath at 30 significant digits
from the gamma-quotient formulas; eigen-level positions and node counts
are exact statements checked directly.
"""

import math

import numpy as np
import pytest

from susyqm.errors import ParameterDegeneracyError
from susyqm.numerics import (
    Grid1D,
    count_nodes,
    inner_product,
    residual_schrodinger,
)
from susyqm.poschl_teller import (
    PTParams,
    pt_ab_coefficients,
    pt_confluent_w,
    pt_eigenvalue,
    pt_grid,
    pt_node_prediction,
    pt_normalized_eigenfunction,
    pt_potential,
    pt_recipe_ab,
    pt_recipe_eigen,
    pt_recipe_from_q,
    pt_seed,
)


# ---------------------------------------------------------------------------
# spectrum and eigenfunctions

def test_eigenvalues_closed_form(pt34, pt58):
    assert [pt_eigenvalue(pt34, n) for n in range(5)] == [
        24.5, 40.5, 60.5, 84.5, 112.5]
    assert [pt_eigenvalue(pt58, n) for n in range(4)] == [
        84.5, 112.5, 144.5, 180.5]


def test_eigenfunction_residuals(pt34):
    grid = pt_grid()
    V = pt_potential(pt34)
    # the finite-difference residual floor grows like h^4 E^3 with the level
    for n in range(4):
        psi = pt_normalized_eigenfunction(pt34, n, grid=grid)
        res = residual_schrodinger(V, psi, pt_eigenvalue(pt34, n))
        assert res <= 5e-8, f"level {n}: residual {res:.2e}"


def test_eigenfunction_orthonormality(pt34):
    grid = pt_grid()
    states = [pt_normalized_eigenfunction(pt34, n, grid=grid)
              for n in range(4)]
    for i in range(4):
        for j in range(i, 4):
            overlap = inner_product(states[i], states[j])
            target = 1.0 if i == j else 0.0
            assert abs(overlap - target) <= 1e-9


def test_eigenfunction_node_counts(pt34):
    grid = pt_grid()
    for n in range(4):
        psi = pt_normalized_eigenfunction(pt34, n, grid=grid)
        assert count_nodes(psi) == n


# ---------------------------------------------------------------------------
# connection constants

def test_branch_coefficients_frozen(pt34):
    # mpmath, dps=30: gamma-quotient constants at epsilon = 19
    a, b = pt_ab_coefficients(pt34, 19.0)
    assert a == pytest.approx(0.01559524055517092, rel=1e-12)
    assert b == pytest.approx(-0.20715637089009051, rel=1e-12)


def test_branch_coefficients_complex_frozen(pt58):
    # mpmath, dps=30, epsilon = 176.344 + 1.5i
    a, _ = pt_ab_coefficients(pt58, 176.344 + 1.5j)
    ref = -5.6217589030468745e-08 + 2.3386743502047351e-08j
    assert abs(a - ref) <= 1e-12 * abs(ref)


def test_right_basis_coefficients_frozen(pt34):
    # mpmath, dps=30: connection onto the right-wall basis at epsilon = 19
    from susyqm.poschl_teller import _right_basis_coefficients
    r1, r2 = _right_basis_coefficients(pt34, 19.0)
    assert r1 == pytest.approx(0.22491263125209784, rel=1e-12)
    assert r2 == pytest.approx(42.813935922700495, rel=1e-12)


def test_half_integer_right_index_rejected():
    params = PTParams(lam=3.0, nu=3.5)
    with pytest.raises(ParameterDegeneracyError):
        pt_seed(pt_recipe_from_q(params, 19.0, 0.3))


# ---------------------------------------------------------------------------
# seed solutions

def test_eigen_seed_matches_normalized_state(pt34):
    grid = pt_grid()
    for n in (0, 2):
        seed = pt_seed(pt_recipe_eigen(pt34, n), grid=grid)
        psi = pt_normalized_eigenfunction(pt34, n, grid=grid)
        # same function up to one overall constant
        i_mid = grid.n_points // 2
        ratio = seed.u.values[i_mid] / psi.values[i_mid]
        assert np.allclose(seed.u.values, ratio * psi.values,
                           rtol=1e-10, atol=1e-10 * abs(ratio))
        assert seed.boundary_tags == ("vanishes", "vanishes")


def test_seed_solves_equation_interior(pt34):
    # wall-divergent seeds are checked away from the inverse-square walls,
    # where the finite-difference stencil is accurate
    grid = pt_grid()
    for q in (0.7, -0.4, 0.0):
        seed = pt_seed(pt_recipe_from_q(pt34, 19.0, q), grid=grid)
        res = residual_schrodinger(pt_potential(pt34), seed.u, 19.0,
                                   margin=200)
        assert res <= 1e-5, f"q={q}: residual {res:.2e}"


def test_seed_derivatives_consistent(pt34):
    grid = pt_grid()
    seed = pt_seed(pt_recipe_from_q(pt34, 19.0, 0.7), grid=grid)
    h = grid.spacing
    v = np.real(seed.u.values)
    d_fd = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    d_exact = np.real(seed.u.derivatives[2:-2])
    inner = slice(200, -200)
    scale = np.max(np.abs(d_exact[inner]))
    assert np.max(np.abs(d_fd[inner] - d_exact[inner])) <= 1e-6 * scale


def test_seed_boundary_tags(pt34):
    grid = pt_grid()
    assert pt_seed(pt_recipe_from_q(pt34, 19.0, 0.5),
                   grid=grid).boundary_tags == ("diverges", "diverges")
    assert pt_seed(pt_recipe_from_q(pt34, 19.0, 0.0),
                   grid=grid).boundary_tags == ("diverges", "vanishes")
    assert pt_seed(pt_recipe_ab(pt34, 19.0, 1.0, 0.0),
                   grid=grid).boundary_tags == ("vanishes", "diverges")


def test_tuned_seed_has_no_cancellation_noise(pt34):
    # the q = 0 combination cancels the right-wall divergence exactly;
    # the remaining regular profile must stay smooth to the wall
    grid = pt_grid()
    seed = pt_seed(pt_recipe_from_q(pt34, 19.0, 0.0), grid=grid)
    v = np.real(seed.u.values)
    assert np.all(np.isfinite(v))
    tail = v[-40:]
    # a cancellation-noise tail would oscillate in sign
    assert np.all(tail > 0) or np.all(tail < 0)


# ---------------------------------------------------------------------------
# node rule

def test_node_rule_seeded_draws(pt34):
    rng = np.random.default_rng(42)
    grid = pt_grid()
    windows = [(24.5, 40.5), (40.5, 60.5), (60.5, 84.5)]
    for k in range(12):
        lo, hi = windows[k % 3]
        eps = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
        q = float(rng.uniform(0.1, 1.5) * rng.choice([-1.0, 1.0]))
        seed = pt_seed(pt_recipe_from_q(pt34, eps, q), grid=grid)
        predicted = pt_node_prediction(pt34, eps, q)
        assert seed.node_count == predicted
        assert count_nodes(seed.u) == predicted, (
            f"eps={eps:.3f} q={q:.3f}")


def test_node_prediction_below_ground(pt34):
    assert pt_node_prediction(pt34, 19.0, 0.5) == 0
    assert pt_node_prediction(pt34, 19.0, -0.5) == 1
    assert pt_node_prediction(pt34, 30.0, 0.5) == 1
    assert pt_node_prediction(pt34, 30.0, -0.5) == 2


# ---------------------------------------------------------------------------
# the integral function of the confluent transform

def test_confluent_w_frozen_values(pt58):
    # mpmath, dps=40: w(x) = int_0^x u^2 for the regular branch at
    # epsilon = 147.92, evaluated by high-order quadrature of the closed form
    grid = Grid1D(0.0, 1.55, 32)
    _, w = pt_confluent_w(pt58, 147.92, grid=grid)
    x = grid.points()
    for x_ref, w_ref in ((0.3, 3.01509249805742408e-8),
                         (0.7, 4.80904666351574956e-7),
                         (1.0, 7.94335108615617862e-7)):
        i = int(np.argmin(np.abs(x - x_ref)))
        assert abs(x[i] - x_ref) < 1e-12
        assert w.values[i] == pytest.approx(w_ref, rel=1e-9)


def test_confluent_w_derivative_is_seed_squared(pt58):
    grid = pt_grid(1201)
    seed, w = pt_confluent_w(pt58, 147.92, grid=grid)
    assert np.array_equal(w.derivatives, np.real(seed.u.values) ** 2)
    assert np.all(np.diff(w.values) > 0)
    assert w.values[0] <= w.values[1] * 1e-3


def test_confluent_w_eigen_termination(pt58):
    # at an eigenvalue the series terminates and the whole grid is summed
    # in closed form; w then equals the cumulative norm of the bound state
    grid = pt_grid(1201)
    seed, w = pt_confluent_w(pt58, pt_eigenvalue(pt58, 1), grid=grid)
    norm_total = inner_product(seed.u, seed.u)
    assert w.values[-1] == pytest.approx(norm_total, rel=1e-6)
