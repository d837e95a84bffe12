"""Band structure through the transfer matrix, and periodic partners.

The Mathieu comparison is a live cross-check: scipy.special.mathieu_a/b
solve the same band-edge problem through a completely different route
(Fourier continued fractions), so agreement validates the monodromy
integration end to end.
"""

import numpy as np
import pytest
from scipy.special import ellipk, mathieu_a, mathieu_b

from susyqm.errors import InconsistentSeedError, SingularTransformError
from susyqm.numerics import residual_schrodinger
from susyqm.periodic import (
    LameParams,
    band_edges,
    bloch_initial_data,
    combination_seed,
    discriminant,
    lame1_band_edge_states,
    lame_band_edge_energies,
    lame_cell_grid,
    lame_potential,
    susy_periodic_first,
    susy_periodic_first_general,
    susy_periodic_second,
    tail_log_slope,
    transfer_matrix,
)


def _sin2_potential(x):
    return 5.0 * np.sin(x) ** 2


@pytest.fixture(scope="module")
def sin2_bands():
    return band_edges(_sin2_potential, np.pi, (0.0, 9.0))


# ---------------------------------------------------------------------------
# transfer matrix and discriminant

def test_transfer_matrix_unimodular():
    # absolute 1e-9 is meaningful inside the scanned window; far below the
    # well the entries grow to ~1e3 and only det/||M||^2 stays at eps
    rng = np.random.default_rng(21)
    energies = rng.uniform(0.0, 9.0, size=50)
    tm = transfer_matrix(_sin2_potential, np.pi, energies)
    for j in range(len(energies)):
        M = tm.matrix[:, :, j]
        assert abs(np.linalg.det(M) - 1.0) <= 1e-9


def test_free_particle_discriminant():
    energies = np.linspace(0.05, 9.0, 40)
    fd = discriminant(lambda x: np.zeros_like(x), np.pi, energies)
    ref = 2.0 * np.cos(np.pi * np.sqrt(2.0 * energies))
    assert np.max(np.abs(fd.discriminant - ref)) <= 1e-8


def test_mathieu_band_edges_against_scipy(sin2_bands):
    # V = 5 sin^2 x  <->  Mathieu equation with q = 2.5, a = 2 E - 5
    bs = sin2_bands
    edges = [edge.energy for edge in bs.edges]
    ref = [(mathieu_a(0, 2.5) + 5.0) / 2.0,
           (mathieu_b(1, 2.5) + 5.0) / 2.0,
           (mathieu_a(1, 2.5) + 5.0) / 2.0,
           (mathieu_b(2, 2.5) + 5.0) / 2.0,
           (mathieu_a(2, 2.5) + 5.0) / 2.0,
           (mathieu_b(3, 2.5) + 5.0) / 2.0]
    assert len(edges) >= 6
    for e, r in zip(edges[:6], ref):
        assert abs(e - r) <= 1e-9
    kinds = [edge.kind for edge in bs.edges[:6]]
    assert kinds == ["periodic", "antiperiodic", "antiperiodic",
                     "periodic", "periodic", "antiperiodic"]


def test_mathieu_band_edges_frozen(sin2_bands):
    frozen = [1.423460828979, 1.461834247086, 3.747965373223,
              4.246237183369, 5.306520542434, 7.092854985070]
    found = [edge.energy for edge in sin2_bands.edges[:6]]
    assert np.max(np.abs(np.asarray(found) - frozen)) <= 1e-9


def test_band_interval_structure(sin2_bands):
    bs = sin2_bands
    assert len(bs.bands) >= 3
    for lo, hi in bs.bands:
        assert lo < hi
    for (a, b), (c, d) in zip(bs.bands, bs.bands[1:]):
        assert b <= c


# ---------------------------------------------------------------------------
# Lame n = 1

def test_lame_band_edges_closed_form():
    for m in (0.3, 0.5, 0.7):
        params = LameParams(m)
        bs = band_edges(lame_potential(params), params.period, (-0.1, 1.2))
        found = [edge.energy for edge in bs.edges[:3]]
        ref = lame_band_edge_energies(params)
        assert np.max(np.abs(np.asarray(found) - ref)) <= 1e-6


def test_lame_edge_states_solve_equation():
    params = LameParams(0.5)
    grid = lame_cell_grid(params)
    V = lame_potential(params)
    states = lame1_band_edge_states(params, grid)
    for name, energy in zip(("dn", "cn", "sn"),
                            lame_band_edge_energies(params)):
        res = residual_schrodinger(V, states[name], energy)
        assert res <= 1e-8


def test_lame_edge_state_wronskian_is_dn():
    # cn' = -sn dn and sn' = cn dn give W(cn, sn) = dn (cn^2 + sn^2) = dn
    params = LameParams(0.5)
    grid = lame_cell_grid(params)
    states = lame1_band_edge_states(params, grid)
    cn, sn, dn = states["cn"], states["sn"], states["dn"]
    w = cn.values * sn.derivatives - cn.derivatives * sn.values
    assert np.max(np.abs(w - dn.values)) <= 1e-12


def test_lame_period_matches_elliptic_integral():
    for m in (0.3, 0.5, 0.7):
        assert LameParams(m).period == pytest.approx(
            2.0 * float(ellipk(m)), rel=1e-12)


def test_bloch_multipliers():
    params = LameParams(0.5)
    V = lame_potential(params)
    T = params.period
    edges = lame_band_edge_energies(params)
    inside = 0.5 * (edges[0] + edges[1])     # inside the first band
    gap = 0.5 * (edges[1] + edges[2])        # inside the gap
    betas, _ = bloch_initial_data(V, T, inside)
    assert abs(betas[0] * betas[1] - 1.0) <= 1e-9
    assert abs(abs(betas[0]) - 1.0) <= 1e-8
    betas, _ = bloch_initial_data(V, T, gap)
    assert abs(betas[0] * betas[1] - 1.0) <= 1e-9
    assert np.max(np.abs(betas)) > 1.0 + 1e-6
    assert np.max(np.abs(np.imag(betas))) <= 1e-9


# ---------------------------------------------------------------------------
# periodic SUSY partners

def test_self_isospectral_first_order():
    for m in (0.3, 0.5, 0.7):
        params = LameParams(m)
        result = susy_periodic_first(params)
        assert result.asymptotics["sup_error"] <= 1e-7
        assert abs(result.asymptotics["shift"]
                   - result.asymptotics["quarter_period"]) <= 1e-6


def test_self_isospectral_second_order():
    for m in (0.3, 0.5, 0.7):
        params = LameParams(m)
        result = susy_periodic_second(params, edge_pair=True)
        assert result.asymptotics["sup_error"] <= 1e-7
        assert abs(result.asymptotics["shift"]
                   - result.asymptotics["quarter_period"]) <= 1e-6


def test_combination_seed_node_counts():
    params = LameParams(0.5)
    grid = lame_cell_grid(params)
    s_a = combination_seed(params, 0.64, 1.0, 1.0, grid)
    s_b = combination_seed(params, 0.65, 1.0, 1.0, grid)
    assert abs(s_a.node_count - s_b.node_count) == 1


def test_first_general_rejects_opposite_signs():
    params = LameParams(0.5)
    with pytest.raises(InconsistentSeedError):
        susy_periodic_first_general(LameParams(0.5), 0.1,
                                    c_plus=1.0, c_minus=-1.0)


def test_combination_seed_rejects_in_band_energy():
    params = LameParams(0.5)
    grid = lame_cell_grid(params)
    with pytest.raises(InconsistentSeedError):
        combination_seed(params, 0.4, 1.0, 1.0, grid)


def test_first_general_rejects_gap_energy():
    # a combination at a finite-gap energy oscillates, so the nodeless
    # requirement localizes first-order defect creation below the spectrum
    params = LameParams(0.5)
    grid = lame_cell_grid(params)
    with pytest.raises(SingularTransformError):
        susy_periodic_first_general(params, 0.64, grid=grid)


def test_below_band_defect_decay_rate():
    # the created defect state must decay at the rate fixed by the
    # discriminant: kappa = acosh(|D| / 2) / T at the seed energy
    params = LameParams(0.5)
    T = params.period
    grid = lame_cell_grid(params, n_cells_per_side=16)
    result = susy_periodic_first_general(params, 0.1, grid=grid)
    assert result.case == "create-level"
    state = result.new_states[0]
    assert state.normalizable
    d = float(discriminant(lame_potential(params), T, [0.1]).discriminant[0])
    kappa = np.arccosh(abs(d) / 2.0) / T
    for side in ("left", "right"):
        slope = tail_log_slope(state.state, side, T)
        assert slope < -1e-3
        assert abs(abs(slope) - kappa) <= 0.01 * kappa


def test_second_order_gap_pair_two_defects():
    params = LameParams(0.5)
    T = params.period
    grid = lame_cell_grid(params, n_cells_per_side=16)
    result = susy_periodic_second(params, epsilon1=0.64, epsilon2=0.65,
                                  grid=grid)
    assert len(result.new_states) == 2
    V = lame_potential(params)
    for ns in result.new_states:
        assert ns.normalizable
        d = float(discriminant(V, T, [ns.energy.real]).discriminant[0])
        kappa = np.arccosh(abs(d) / 2.0) / T
        for side in ("left", "right"):
            slope = tail_log_slope(ns.state, side, T)
            assert abs(abs(slope) - kappa) <= 0.01 * kappa


def test_tail_log_slope_validation():
    params = LameParams(0.5)
    grid = lame_cell_grid(params)
    state = lame1_band_edge_states(params, grid)["dn"]
    with pytest.raises(ValueError):
        tail_log_slope(state, "up", params.period)
    with pytest.raises(ValueError):
        tail_log_slope(state, "left", params.period, n_cells=1)
    with pytest.raises(ValueError):
        tail_log_slope(state, "left", 100.0 * params.period)
