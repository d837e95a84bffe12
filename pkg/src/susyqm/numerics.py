"""Uniform grids, sampled wavefunctions and the fixed-step Schrodinger integrator.

Everything downstream works with functions sampled on uniform grids.  A
SampledFunction carries values together with first derivatives so that
first-order operators like (-d/dx + alpha)/sqrt(2) can be applied without
re-differentiating freshly integrated data.

Potentials that diverge at domain endpoints are sampled on grids whose first
and last nodes sit half a spacing inside the endpoints (see offset_grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicSpline

from .errors import SingularTransformError

DEFAULT_N_POINTS = 2001
OVERFLOW_CAP = 1e250


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n_points nodes on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_points: int = DEFAULT_N_POINTS

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError("n_points must be at least 8")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def index_of(self, x: float) -> int:
        """Index of the node at x; raises if x is not a grid node."""
        i = int(round((x - self.x_min) / self.spacing))
        if not 0 <= i < self.n_points:
            raise ValueError(f"x={x} lies outside the grid")
        if abs(self.x_min + i * self.spacing - x) > 1e-8 * max(1.0, abs(x)):
            raise ValueError(f"x={x} is not a grid node")
        return i


def offset_grid(a: float, b: float, n_points: int = DEFAULT_N_POINTS) -> Grid1D:
    """Grid for a domain (a, b) with divergent endpoints.

    The n_points nodes are the midpoints of an n_points-cell partition, so the
    first and last nodes sit spacing/2 inside the endpoints and the node
    spacing equals (b - a)/n_points.
    """
    h = (b - a) / n_points
    return Grid1D(a + h / 2, b - h / 2, n_points)


@dataclass
class SampledFunction:
    """Function values and first derivatives sampled on a grid."""

    grid: Grid1D
    values: np.ndarray
    derivatives: np.ndarray
    overflow: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.derivatives = np.asarray(self.derivatives)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("values shape does not match the grid")
        if self.derivatives.shape != (self.grid.n_points,):
            raise ValueError("derivatives shape does not match the grid")

    @property
    def x(self) -> np.ndarray:
        return self.grid.points()

    def is_real(self, tol: float = 0.0) -> bool:
        if not np.iscomplexobj(self.values):
            return True
        scale = np.max(np.abs(self.values)) or 1.0
        return bool(np.max(np.abs(self.values.imag)) <= tol * scale)


def same_grid(f: SampledFunction, g: SampledFunction) -> None:
    ga, gb = f.grid, g.grid
    if (ga.n_points != gb.n_points or abs(ga.x_min - gb.x_min) > 1e-12
            or abs(ga.x_max - gb.x_max) > 1e-12):
        raise ValueError("sampled functions live on different grids")


# ---------------------------------------------------------------------------
# finite differences (4th order, uniform grids)

def _fd_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    """Weights w such that sum w_i f(x + o_i h) ~ h^order f^(order)(x)."""
    n = len(offsets)
    A = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(A, rhs)


def fd_derivative(values: np.ndarray, spacing: float) -> np.ndarray:
    """First derivative by 4th-order centered stencils, one-sided at the edges."""
    v = np.asarray(values)
    d = np.empty_like(v, dtype=complex if np.iscomplexobj(v) else float)
    h = spacing
    d[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    for i in (0, 1):
        w = _fd_weights(np.arange(6) - i, 1)
        d[i] = w @ v[:6] / h
    w_last = _fd_weights(np.arange(-5, 1), 1)
    w_penult = _fd_weights(np.arange(-4, 2), 1)
    d[-1] = w_last @ v[-6:] / h
    d[-2] = w_penult @ v[-6:] / h
    return d


def fd_second_derivative(values: np.ndarray, spacing: float) -> np.ndarray:
    """Second derivative by 4th-order centered stencils, one-sided at the edges."""
    v = np.asarray(values)
    d = np.empty_like(v, dtype=complex if np.iscomplexobj(v) else float)
    h2 = spacing * spacing
    d[2:-2] = (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h2)
    for i in (0, 1):
        w = _fd_weights(np.arange(7) - i, 2)
        d[i] = w @ v[:7] / h2
    w_last = _fd_weights(np.arange(-6, 1), 2)
    w_penult = _fd_weights(np.arange(-5, 2), 2)
    d[-1] = w_last @ v[-7:] / h2
    d[-2] = w_penult @ v[-7:] / h2
    return d


# ---------------------------------------------------------------------------
# quadrature helpers (composite Simpson)

def _spacing_of(grid) -> float:
    return grid.spacing if isinstance(grid, Grid1D) else float(grid)


def quadrature(values: np.ndarray, grid) -> complex:
    """Integrate samples over the grid; `grid` may be a Grid1D or a spacing."""
    res = simpson(values, dx=_spacing_of(grid))
    return complex(res) if np.iscomplexobj(values) else float(res)


def l2_norm(values, grid=None) -> float:
    if isinstance(values, SampledFunction):
        values, grid = values.values, values.grid
    return float(np.sqrt(np.real(simpson(np.abs(values) ** 2, dx=_spacing_of(grid)))))


def inner_product(f, g, grid=None) -> complex:
    if isinstance(f, SampledFunction):
        same_grid(f, g)
        f, g, grid = f.values, g.values, f.grid
    return complex(simpson(np.conj(f) * g, dx=_spacing_of(grid)))


def normalized(f, grid=None):
    """Scale to unit L2 norm.

    A SampledFunction comes back as a SampledFunction (derivatives rescaled
    consistently); a plain array with a grid comes back as an array.
    """
    if isinstance(f, SampledFunction):
        n = l2_norm(f)
        if n == 0 or not np.isfinite(n):
            raise ValueError("cannot normalize: norm is zero or not finite")
        return SampledFunction(f.grid, f.values / n, f.derivatives / n,
                               overflow=f.overflow)
    n = l2_norm(f, grid)
    if n == 0 or not np.isfinite(n):
        raise ValueError("cannot normalize: norm is zero or not finite")
    return np.asarray(f) / n


# ---------------------------------------------------------------------------
# potential evaluation

def potential_callable(V):
    """Return a vectorized callable x -> V(x).

    Accepts a plain callable, or a SampledFunction whose (real) samples get a
    cubic-spline interpolant.
    """
    if callable(V):
        return V
    if isinstance(V, SampledFunction):
        return CubicSpline(V.grid.points(), np.real(V.values))
    raise TypeError(f"cannot interpret {type(V)!r} as a potential")


# ---------------------------------------------------------------------------
# fixed-step RK4 for u'' = 2 (V - epsilon) u

def _rk4_sweep(g_nodes, g_mids, h, u0, du0, record=None, start_index=0,
               overflow_cap=OVERFLOW_CAP):
    """March the (u, u') system across len(g_nodes)-1 steps of size h.

    g_nodes[k] = 2(V - eps) at the k-th node of the sweep, g_mids[k] between
    nodes k and k+1.  Values broadcast over any trailing batch axes.  When
    `record` (list of per-node slots) is given, states are stored as we go.
    Returns (u, du, overflowed).
    """
    u, du = u0, du0
    n_steps = len(g_mids)
    overflow = False
    for k in range(n_steps):
        g0, gm, g1 = g_nodes[k], g_mids[k], g_nodes[k + 1]
        k1u, k1d = du, g0 * u
        k2u = du + 0.5 * h * k1d
        k2d = gm * (u + 0.5 * h * k1u)
        k3u = du + 0.5 * h * k2d
        k3d = gm * (u + 0.5 * h * k2u)
        k4u = du + h * k3d
        k4d = g1 * (u + h * k3u)
        u = u + (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u)
        du = du + (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        if record is not None:
            record[start_index + (k + 1) * (1 if h > 0 else -1)] = (u, du)
        if np.max(np.abs(u)) > overflow_cap:
            overflow = True
            break
    return u, du, overflow


def integrate_schrodinger(V, epsilon, x0: float, u0, du0,
                          grid: Grid1D | None = None,
                          overflow_cap: float = OVERFLOW_CAP) -> SampledFunction:
    """Solve -u''/2 + V u = epsilon u on the grid from data (u0, u0') at x0.

    V may be a SampledFunction (real) or a callable; x0 must be a grid node.
    Classical fixed-step RK4 on the first-order system, marching from x0 in
    both directions.  If |u| exceeds overflow_cap the remaining nodes are
    filled with inf and the overflow flag is set (exponential blow-up is a
    legitimate outcome, not a failure).
    """
    if grid is None:
        if not isinstance(V, SampledFunction):
            raise ValueError("grid is required when V is a callable")
        grid = V.grid
    Vfn = potential_callable(V)
    x = grid.points()
    h = grid.spacing
    i0 = grid.index_of(x0)
    n = grid.n_points

    complex_data = any(isinstance(v, complex) or np.iscomplexobj(v)
                       for v in (u0, du0, epsilon))
    dtype = complex if complex_data else float
    vals = np.full(n, np.inf, dtype=dtype)
    ders = np.full(n, np.inf, dtype=dtype)
    vals[i0], ders[i0] = u0, du0

    V_nodes = np.asarray(Vfn(x), dtype=float)
    V_mids = np.asarray(Vfn(x[:-1] + 0.5 * h), dtype=float)
    overflow = False

    # rightward sweep
    if i0 < n - 1:
        g_nodes = 2.0 * (V_nodes[i0:] - epsilon)
        g_mids = 2.0 * (V_mids[i0:] - epsilon)
        u, du = np.asarray(u0, dtype=dtype), np.asarray(du0, dtype=dtype)
        rec = {}
        _, _, of = _rk4_sweep(g_nodes, g_mids, h, u, du, record=rec,
                              start_index=0, overflow_cap=overflow_cap)
        for k, (uu, dd) in rec.items():
            vals[i0 + k], ders[i0 + k] = uu, dd
        overflow |= of
    # leftward sweep
    if i0 > 0:
        g_nodes = 2.0 * (V_nodes[i0::-1] - epsilon)
        g_mids = 2.0 * (V_mids[i0 - 1::-1] - epsilon)
        u, du = np.asarray(u0, dtype=dtype), np.asarray(du0, dtype=dtype)
        rec = {}
        _, _, of = _rk4_sweep(g_nodes, g_mids, -h, u, du, record=rec,
                              start_index=0, overflow_cap=overflow_cap)
        for k, (uu, dd) in rec.items():
            vals[i0 + k], ders[i0 + k] = uu, dd
        overflow |= of
    return SampledFunction(grid, vals, ders, overflow=overflow)


# ---------------------------------------------------------------------------
# nodes, Wronskians, log-derivative curvature

def count_nodes(u: SampledFunction, interior_margin: float | None = None) -> int:
    """Strict sign changes of Re(u) on the interior of the grid.

    A margin (default two grid spacings) is ignored at each boundary so that
    endpoint zeros of regular solutions are not miscounted as nodes.
    """
    h = u.grid.spacing
    if interior_margin is None:
        interior_margin = 2 * h
    k = int(np.ceil(interior_margin / h - 1e-9)) if interior_margin > 0 else 0
    v = np.real(u.values[k:u.grid.n_points - k or None])
    scale = np.max(np.abs(v))
    if scale == 0 or not np.isfinite(scale):
        finite = v[np.isfinite(v)]
        scale = np.max(np.abs(finite)) if finite.size else 1.0
    v = v[np.abs(v) > 1e-12 * scale]
    if v.size < 2:
        return 0
    s = np.sign(v)
    return int(np.sum(s[1:] * s[:-1] < 0))


def first_node_location(u: SampledFunction, interior_margin: float | None = None):
    """x position of the first interior sign change of Re(u), or None."""
    h = u.grid.spacing
    if interior_margin is None:
        interior_margin = 2 * h
    k = int(np.ceil(interior_margin / h - 1e-9)) if interior_margin > 0 else 0
    x = u.grid.points()[k:u.grid.n_points - k or None]
    v = np.real(u.values[k:u.grid.n_points - k or None])
    s = np.sign(v)
    flips = np.nonzero(s[1:] * s[:-1] < 0)[0]
    if flips.size == 0:
        return None
    i = flips[0]
    return float(0.5 * (x[i] + x[i + 1]))


def wronskian(u1: SampledFunction, u2: SampledFunction,
              epsilon1=None, epsilon2=None) -> SampledFunction:
    """W(u1, u2) = u1 u2' - u1' u2 with its derivative field.

    When both energies are known the derivative is filled from the exact
    identity W' = 2 (epsilon1 - epsilon2) u1 u2; otherwise by finite
    differences of the sampled W.
    """
    same_grid(u1, u2)
    w = u1.values * u2.derivatives - u1.derivatives * u2.values
    if epsilon1 is not None and epsilon2 is not None:
        dw = 2.0 * (epsilon1 - epsilon2) * u1.values * u2.values
    else:
        dw = fd_derivative(w, u1.grid.spacing)
    return SampledFunction(u1.grid, w, dw)


def log_second_derivative(u: SampledFunction) -> SampledFunction:
    """-(ln u)'' from the sampled u and u'.

    The log-derivative u'/u is formed pointwise and differentiated with
    4th-order stencils.  An interior node of u makes the quantity singular and
    raises SingularTransformError.
    """
    if not np.all(np.isfinite(u.values)) or np.min(np.abs(u.values)) == 0:
        raise SingularTransformError("u vanishes or overflows on the grid",
                                     x_node=first_node_location(u, 0.0))
    if not np.iscomplexobj(u.values) and count_nodes(u, 0.0) > 0:
        raise SingularTransformError("u has an interior node",
                                     x_node=first_node_location(u, 0.0))
    alpha = u.derivatives / u.values
    h = u.grid.spacing
    return SampledFunction(u.grid, -fd_derivative(alpha, h),
                           -fd_second_derivative(alpha, h))


def residual_schrodinger(V, u: SampledFunction, epsilon, margin: int = 5) -> float:
    """Sup-norm residual of -u''/2 + V u - eps u over the interior, relative
    to the interior sup of |u|.  u'' is formed by finite differences of the
    sampled values; `margin` grid points are excluded at each end."""
    Vv = np.real(V.values) if isinstance(V, SampledFunction) else np.asarray(V(u.grid.points()))
    upp = fd_second_derivative(u.values, u.grid.spacing)
    r = -0.5 * upp + (Vv - epsilon) * u.values
    sl = slice(margin, u.grid.n_points - margin)
    denom = np.max(np.abs(u.values[sl]))
    return float(np.max(np.abs(r[sl])) / denom)


def cumulative_quadrature(values: np.ndarray, grid) -> np.ndarray:
    """Cumulative integral from the first node (composite Simpson).

    `grid` may be a Grid1D or a plain spacing.
    """
    return cumulative_simpson(values, dx=_spacing_of(grid), initial=0.0)
