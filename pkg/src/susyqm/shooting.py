"""Bound-state energies by two-sided shooting.

Both half-solutions are integrated toward an interior matching point (the
potential minimum) and an energy is an eigenvalue when their scaled
Wronskian vanishes.  A vectorized scan over an energy window locates sign
changes, which batched bisection refines.  Endpoint data adapts to the wall
type:
an inverse-square wall gets its indicial power-law start, a steep regular
wall gets a decaying start, and an open endpoint gets a Dirichlet start.
"""

from __future__ import annotations

import numpy as np

from .errors import IntegratorAccuracyError
from .numerics import DEFAULT_N_POINTS, Grid1D, offset_grid, potential_callable

__all__ = ["shooting_eigenvalues", "shooting_mismatch"]


def _endpoint_start(V, x_edge: float, xi0: float, inward: float, energies):
    """Initial (u, u') at the node xi0 away from the edge, per energy.

    inward is +1 at the left edge, -1 at the right.  Returns arrays
    broadcast over the energy batch.
    """
    x_node = x_edge + inward * xi0
    v_here = float(V(np.asarray([x_node]))[0])
    c = v_here * xi0 ** 2
    e = np.asarray(energies, dtype=float)
    if c > 0.5:
        # inverse-square wall: u ~ xi^p with p (p - 1) = 2 c
        p = 0.5 * (1.0 + np.sqrt(1.0 + 8.0 * c))
        u0 = np.full_like(e, xi0 ** p)
        du0 = inward * np.full_like(e, p * xi0 ** (p - 1))
    elif v_here > np.max(e):
        # classically forbidden edge: start on the decaying branch
        kappa = np.sqrt(2.0 * (v_here - e))
        u0 = np.full_like(e, 1.0)
        du0 = inward * kappa
    else:
        u0 = np.full_like(e, xi0)
        du0 = inward * np.ones_like(e)
    return u0, du0


def _half_sweeps(V, grid: Grid1D, energies, i_match: int):
    """March both halves to the matching node for a batch of energies."""
    x = grid.points()
    h = grid.spacing
    v_nodes = np.asarray(V(x), dtype=float)
    v_mids = np.asarray(V(0.5 * (x[:-1] + x[1:])), dtype=float)
    e = np.asarray(energies, dtype=float)
    g_nodes = 2.0 * (v_nodes[:, None] - e[None, :])
    g_mids = 2.0 * (v_mids[:, None] - e[None, :])

    uL, duL = _endpoint_start(V, grid.x_min - 0.5 * h, 0.5 * h, +1.0, e)
    uR, duR = _endpoint_start(V, grid.x_max + 0.5 * h, 0.5 * h, -1.0, e)

    # rescaling guards against overflow of the growing branch; checking
    # every few steps is enough headroom below 1e308 even at the steepest
    # inverse-square wall of the supported models
    u, du = uL, duL
    for k in range(i_match):
        u, du = _rk4_step(u, du, g_nodes[k], g_mids[k], g_nodes[k + 1], h)
        if k % 4 == 0:
            scale = np.maximum(np.abs(u), np.abs(du))
            big = scale > 1e200
            if np.any(big):
                u = np.where(big, u / scale, u)
                du = np.where(big, du / scale, du)
    left = (u, du)

    u, du = uR, duR
    for k in range(grid.n_points - 1, i_match, -1):
        u, du = _rk4_step(u, du, g_nodes[k], g_mids[k - 1], g_nodes[k - 1], -h)
        if k % 4 == 0:
            scale = np.maximum(np.abs(u), np.abs(du))
            big = scale > 1e200
            if np.any(big):
                u = np.where(big, u / scale, u)
                du = np.where(big, du / scale, du)
    right = (u, du)
    return left, right


def _rk4_step(u, du, g0, gm, g1, h):
    k1u, k1d = du, g0 * u
    k2u = du + 0.5 * h * k1d
    k2d = gm * (u + 0.5 * h * k1u)
    k3u = du + 0.5 * h * k2d
    k3d = gm * (u + 0.5 * h * k2u)
    k4u = du + h * k3d
    k4d = g1 * (u + h * k3u)
    return (u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u),
            du + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d))


def shooting_mismatch(V, grid: Grid1D, energies, i_match: int | None = None):
    """Scaled Wronskian of the two half-solutions at the matching node."""
    Vc = potential_callable(V)
    if i_match is None:
        i_match = _default_match(Vc, grid)
    (uL, duL), (uR, duR) = _half_sweeps(Vc, grid, energies, i_match)
    w = uL * duR - duL * uR
    scale = np.abs(uL * duR) + np.abs(duL * uR) + 1e-300
    return w / scale


def _default_match(V, grid: Grid1D) -> int:
    x = grid.points()
    return int(np.argmin(np.asarray(V(x), dtype=float)))


def shooting_eigenvalues(V, domain: tuple[float, float], n_levels: int,
                         e_window: tuple[float, float] | None = None,
                         n_points: int = DEFAULT_N_POINTS,
                         n_scan: int = 400,
                         refine_tol: float = 1e-12) -> np.ndarray:
    """The lowest n_levels eigenvalues of -(1/2) u'' + V u = E u on `domain`.

    The energy window is scanned for sign changes of the matching mismatch
    and each bracket is refined.  If no window is given, one is grown
    upward from the potential minimum until enough levels appear.
    """
    Vc = potential_callable(V)
    grid = offset_grid(domain[0], domain[1], n_points)
    i_match = _default_match(Vc, grid)
    v_min = float(np.min(np.asarray(Vc(grid.points()), dtype=float)))

    if e_window is not None:
        windows = [e_window]
    else:
        spread = max(1.0, abs(v_min))
        windows = [(v_min + 1e-6 * spread, v_min + (4.0 ** k) * spread)
                   for k in range(1, 9)]

    roots: list[float] = []
    for lo, hi in windows:
        roots = _scan_window(Vc, grid, i_match, lo, hi, n_scan, n_levels,
                             refine_tol)
        if len(roots) >= n_levels:
            break
    if len(roots) < n_levels:
        raise IntegratorAccuracyError(
            f"found only {len(roots)} levels in the scanned window; "
            "widen e_window or increase n_scan")
    return np.asarray(roots[:n_levels])


def _scan_window(Vc, grid, i_match, lo, hi, n_scan, n_levels, refine_tol):
    energies = np.linspace(lo, hi, n_scan)
    f = np.asarray(shooting_mismatch(Vc, grid, energies, i_match))
    f = np.where(np.isfinite(f), f, 0.0)
    roots = []
    a_list, b_list, fa_list = [], [], []
    for j in range(len(energies) - 1):
        if f[j] == 0.0:
            roots.append(float(energies[j]))
        elif f[j] * f[j + 1] < 0:
            a_list.append(energies[j])
            b_list.append(energies[j + 1])
            fa_list.append(f[j])
        if len(roots) + len(a_list) >= n_levels + 2:
            break
    if a_list:
        # refine every bracket at once: one batched sweep per bisection
        # step instead of a scalar solver making a full sweep per call
        a = np.asarray(a_list)
        b = np.asarray(b_list)
        fa = np.asarray(fa_list)
        eps_rel = 32.0 * np.finfo(float).eps
        for _ in range(128):
            mid = 0.5 * (a + b)
            done = (b - a) <= np.maximum(refine_tol, eps_rel * np.abs(mid))
            if np.all(done):
                break
            fm = np.asarray(shooting_mismatch(Vc, grid, mid, i_match))
            fm = np.where(np.isfinite(fm), fm, 0.0)
            go_left = (fa * fm > 0) & ~done
            go_right = (fa * fm <= 0) & ~done
            a = np.where(go_left, mid, a)
            fa = np.where(go_left, fm, fa)
            b = np.where(go_right, mid, b)
        roots.extend(float(r) for r in 0.5 * (a + b))
    roots.sort()
    return roots
