"""Band structure of periodic potentials by Floquet analysis, and Darboux
transformations of the single-gap Lame potential.

The monodromy matrix over one period has unit determinant (a sharp
invariant of the propagation) and its trace D(E) fixes the band structure:
|D| < 2 inside allowed bands, D = +2 / -2 at periodic / antiperiodic band
edges.  The n = 1 Lame potential V = m sn^2(x|m) has exactly three edges
m/2, 1/2, (1 + m)/2 with edge states dn, cn, sn, and its Darboux partners
through those states reproduce the potential shifted by a quarter period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from .errors import InconsistentSeedError, SingularTransformError
from .numerics import (
    Grid1D,
    SampledFunction,
    count_nodes,
    integrate_schrodinger,
    potential_callable,
)
from .special import elliptic_K, jacobi_elliptic
from .susy import (
    PartnerResult,
    PotentialModel,
    SeedSolution,
    first_order_partner,
    second_order_real,
)

__all__ = [
    "TransferMatrix",
    "FloquetData",
    "BandEdge",
    "BandStructure",
    "LameParams",
    "transfer_matrix",
    "discriminant",
    "band_edges",
    "bloch_initial_data",
    "lame_potential",
    "lame_model",
    "sin2_model",
    "lame_band_edge_energies",
    "lame1_band_edge_states",
    "lame_cell_grid",
    "combination_seed",
    "susy_periodic_first",
    "susy_periodic_first_general",
    "susy_periodic_second",
    "tail_log_slope",
    "best_shift",
]

_DEFAULT_STEPS = 4000


# ---------------------------------------------------------------------------
# monodromy and bands

@dataclass(frozen=True)
class TransferMatrix:
    """Monodromy over one period for a batch of energies: matrix has shape
    (2, 2, n_energies); det_residual = max |det - 1|."""

    energies: np.ndarray
    matrix: np.ndarray
    det_residual: float


@dataclass(frozen=True)
class FloquetData:
    energies: np.ndarray
    discriminant: np.ndarray
    multipliers: np.ndarray  # shape (2, n_energies), complex
    det_residual: float


@dataclass(frozen=True)
class BandEdge:
    energy: float
    kind: str  # "periodic" (D = +2) or "antiperiodic" (D = -2)
    closed_gap: bool = False


@dataclass(frozen=True)
class BandStructure:
    edges: list[BandEdge]
    bands: list[tuple[float, float]] = field(default_factory=list)


class _CellStencil:
    """Cached samples of V at the RK4 nodes and midpoints of one period."""

    def __init__(self, V, x_start: float, period: float, n_steps: int):
        h = period / n_steps
        x = x_start + h * np.arange(n_steps + 1)
        self.h = h
        self.v_nodes = np.asarray(V(x), dtype=float)
        self.v_mids = np.asarray(V(x[:-1] + 0.5 * h), dtype=float)

    def propagate(self, energies):
        """Both fundamental columns across the cell, batched over energy.

        The two columns ride in one leading axis so each step is a single
        vectorized stage rather than two."""
        e = np.asarray(energies, dtype=float)
        g_nodes = 2.0 * (self.v_nodes[:, None] - e[None, :])
        g_mids = 2.0 * (self.v_mids[:, None] - e[None, :])
        ones = np.ones_like(e)
        zeros = np.zeros_like(e)
        u = np.stack([ones, zeros])
        du = np.stack([zeros, ones])
        h = self.h
        for k in range(len(self.v_mids)):
            u, du = _rk4(u, du, g_nodes[k], g_mids[k], g_nodes[k + 1], h)
        m = np.empty((2, 2, len(e)))
        m[0, 0], m[0, 1] = u[0], u[1]
        m[1, 0], m[1, 1] = du[0], du[1]
        return m


def _rk4(u, du, g0, gm, g1, h):
    k1u, k1d = du, g0 * u
    k2u = du + 0.5 * h * k1d
    k2d = gm * (u + 0.5 * h * k1u)
    k3u = du + 0.5 * h * k2d
    k3d = gm * (u + 0.5 * h * k2u)
    k4u = du + h * k3d
    k4d = g1 * (u + h * k3u)
    return (u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u),
            du + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d))


def transfer_matrix(V, period: float, energies, x_start: float = 0.0,
                    n_steps: int = _DEFAULT_STEPS) -> TransferMatrix:
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    stencil = _CellStencil(V, x_start, period, n_steps)
    m = stencil.propagate(e)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return TransferMatrix(e, m, float(np.max(np.abs(det - 1.0))))


def discriminant(V, period: float, energies, x_start: float = 0.0,
                 n_steps: int = _DEFAULT_STEPS) -> FloquetData:
    tm = transfer_matrix(V, period, energies, x_start, n_steps)
    D = tm.matrix[0, 0] + tm.matrix[1, 1]
    disc = np.asarray(D, dtype=complex)
    root = np.sqrt(disc ** 2 / 4.0 - 1.0)
    mult = np.stack([disc / 2.0 + root, disc / 2.0 - root])
    return FloquetData(tm.energies, np.real(D), mult, tm.det_residual)


def band_edges(V, period: float, e_window: tuple[float, float],
               n_scan: int = 600, x_start: float = 0.0,
               n_steps: int = _DEFAULT_STEPS,
               derivative_tol: float = 1e-3) -> BandStructure:
    """Locate all solutions of D(E) = +-2 in the window.

    Each root of D -+ 2 is refined by bisection on the cached stencil;
    an edge where |D'| is below derivative_tol marks a closed gap
    (degenerate double edge)."""
    stencil = _CellStencil(V, x_start, period, n_steps)
    energies = np.linspace(e_window[0], e_window[1], n_scan)
    m = stencil.propagate(energies)
    D = m[0, 0] + m[1, 1]

    roots: list[tuple[float, str]] = []
    a_list, b_list, fa_list, kinds = [], [], [], []
    for target, kind in ((2.0, "periodic"), (-2.0, "antiperiodic")):
        g = D - target
        for j in range(n_scan - 1):
            if g[j] == 0.0:
                roots.append((float(energies[j]), kind))
            elif g[j] * g[j + 1] < 0:
                a_list.append(energies[j])
                b_list.append(energies[j + 1])
                fa_list.append(g[j])
                kinds.append(kind)
    if a_list:
        # one batched cell propagation per bisection step refines every
        # bracket at once
        a = np.asarray(a_list)
        b = np.asarray(b_list)
        fa = np.asarray(fa_list)
        targets = np.where([k == "periodic" for k in kinds], 2.0, -2.0)
        eps_rel = 32.0 * np.finfo(float).eps
        for _ in range(96):
            mid = 0.5 * (a + b)
            done = (b - a) <= np.maximum(1e-12, eps_rel * np.abs(mid))
            if np.all(done):
                break
            mm = stencil.propagate(mid)
            fm = (mm[0, 0] + mm[1, 1]) - targets
            go_left = (fa * fm > 0) & ~done
            go_right = (fa * fm <= 0) & ~done
            a = np.where(go_left, mid, a)
            fa = np.where(go_left, fm, fa)
            b = np.where(go_right, mid, b)
        roots.extend(zip((float(r) for r in 0.5 * (a + b)), kinds))

    found: list[BandEdge] = []
    if roots:
        e_arr = np.asarray([r[0] for r in roots])
        de = np.maximum(1e-6, 1e-7 * np.maximum(1.0, np.abs(e_arr)))
        mm = stencil.propagate(np.concatenate([e_arr + de, e_arr - de]))
        dd = mm[0, 0] + mm[1, 1]
        n = len(e_arr)
        slopes = (dd[:n] - dd[n:]) / (2.0 * de)
        for (e_root, kind), slope in zip(roots, slopes):
            found.append(BandEdge(e_root, kind,
                                  closed_gap=abs(float(slope)) < derivative_tol))
    found.sort(key=lambda b: b.energy)
    bands = []
    for lo, hi in zip(found[::2], found[1::2]):
        bands.append((lo.energy, hi.energy))
    return BandStructure(found, bands)


def bloch_initial_data(V, period: float, energy: float, x_start: float = 0.0,
                       n_steps: int = _DEFAULT_STEPS):
    """Floquet multipliers and the matching (u, u') eigen-data at x_start.

    Returns (multipliers, vectors): two multipliers beta with M v = beta v;
    vectors are unit 2-vectors (columns)."""
    tm = transfer_matrix(V, period, np.asarray([energy]), x_start, n_steps)
    M = tm.matrix[:, :, 0]
    D = M[0, 0] + M[1, 1]
    disc = complex(D) ** 2 / 4.0 - 1.0
    root = np.sqrt(complex(disc))
    betas = [D / 2.0 + root, D / 2.0 - root]
    vectors = []
    for beta in betas:
        v1 = np.array([M[0, 1], beta - M[0, 0]], dtype=complex)
        v2 = np.array([beta - M[1, 1], M[1, 0]], dtype=complex)
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        n = np.linalg.norm(v)
        if n == 0:
            raise InconsistentSeedError(
                "degenerate monodromy: no one-dimensional eigenspace")
        v = v / n
        if abs(np.max(np.abs(v.imag))) < 1e-12:
            v = v.real
        vectors.append(v)
    return np.asarray(betas), vectors


# ---------------------------------------------------------------------------
# the n = 1 Lame potential

@dataclass(frozen=True)
class LameParams:
    """Elliptic parameter m of V(x) = m sn^2(x | m); period 2 K(m)."""

    m: float

    def __post_init__(self):
        if not 0.0 < self.m < 1.0:
            raise ValueError("the elliptic parameter must lie in (0, 1)")

    @property
    def period(self) -> float:
        return 2.0 * elliptic_K(self.m)


def lame_potential(params: LameParams):
    m = params.m

    def V(x):
        sn, _, _ = jacobi_elliptic(np.asarray(x, dtype=float), m)
        return m * sn ** 2

    return V


def lame_model(params: LameParams) -> PotentialModel:
    return PotentialModel(potential=lame_potential(params),
                          domain=(-math.inf, math.inf),
                          kind="periodic",
                          period=params.period,
                          label=f"single-gap Lame potential m={params.m}")


def sin2_model(strength: float = 5.0) -> PotentialModel:
    return PotentialModel(potential=lambda x: strength * np.sin(x) ** 2,
                          domain=(-math.inf, math.inf),
                          kind="periodic",
                          period=math.pi,
                          label=f"{strength} sin^2 x")


def lame_band_edge_energies(params: LameParams) -> tuple[float, float, float]:
    m = params.m
    return (m / 2.0, 0.5, (1.0 + m) / 2.0)


def lame_cell_grid(params: LameParams, n_cells_per_side: int = 12,
                   points_per_cell: int = 300) -> Grid1D:
    """Uniform grid over +-n_cells_per_side periods with x = 0 as a node."""
    T = params.period
    n = 2 * n_cells_per_side * points_per_cell
    half = n_cells_per_side * T
    return Grid1D(-half, half, n + 1)


def lame1_band_edge_states(params: LameParams, grid: Grid1D):
    """The three exact edge states dn, cn, sn with exact derivatives."""
    m = params.m
    x = grid.points()
    sn, cn, dn = jacobi_elliptic(x, m)
    states = {
        "dn": SampledFunction(grid, dn, -m * sn * cn),
        "cn": SampledFunction(grid, cn, -sn * dn),
        "sn": SampledFunction(grid, sn, cn * dn),
    }
    return states


def _lame_edge_seed(params: LameParams, which: str, grid: Grid1D) -> SeedSolution:
    e_dn, e_cn, e_sn = lame_band_edge_energies(params)
    energy = {"dn": e_dn, "cn": e_cn, "sn": e_sn}[which]
    u = lame1_band_edge_states(params, grid)[which]
    return SeedSolution(energy, u, ("finite", "finite"),
                        node_count=None,
                        construction=f"exact {which} band-edge state")


def combination_seed(params: LameParams, epsilon: float,
                     c_plus: float, c_minus: float,
                     grid: Grid1D | None = None,
                     n_steps: int = _DEFAULT_STEPS) -> SeedSolution:
    """Seed c+ u+ + c- u- from the two Bloch solutions at a gap energy.

    In a spectral gap the multipliers are real with |beta| != 1, so any
    combination with both coefficients nonzero grows in both directions;
    outward integration from x = 0 is then stable.
    """
    if grid is None:
        grid = lame_cell_grid(params)
    V = lame_potential(params)
    betas, vectors = bloch_initial_data(V, params.period, epsilon,
                                        n_steps=n_steps)
    if np.max(np.abs(np.imag(betas))) > 1e-9:
        raise InconsistentSeedError(
            f"energy {epsilon} lies inside an allowed band; combination "
            "seeds need a gap energy")
    order = np.argsort(-np.abs(np.real(betas)))  # growing-to-the-right first
    w_plus = np.real(vectors[order[0]])
    w_minus = np.real(vectors[order[1]])
    u0, du0 = c_plus * w_plus + c_minus * w_minus
    u = integrate_schrodinger(V, epsilon, 0.0, u0, du0, grid=grid)
    if u.overflow:
        raise InconsistentSeedError(
            "combination seed overflowed; reduce the number of cells")
    tags = ("diverges" if c_minus != 0 else "vanishes",
            "diverges" if c_plus != 0 else "vanishes")
    return SeedSolution(epsilon, u, tags, count_nodes(u),
                        f"Bloch combination c+={c_plus} c-={c_minus}")


# ---------------------------------------------------------------------------
# Darboux transforms of the Lame potential

def best_shift(V_new: SampledFunction, V_ref, period: float,
               window: tuple[float, float] | None = None,
               n_probe: int = 2001) -> tuple[float, float]:
    """Displacement s minimizing sup |V_new(x) - V_ref(x + s)| over a window.

    Scans one period, then refines by golden-section; returns (s, sup)."""
    grid = V_new.grid
    if window is None:
        window = (grid.x_min + 0.1 * (grid.x_max - grid.x_min),
                  grid.x_max - 0.1 * (grid.x_max - grid.x_min))
    x = np.linspace(window[0], window[1], n_probe)
    vn = potential_callable(V_new)
    base = vn(x)

    def sup_err(s: float) -> float:
        return float(np.max(np.abs(base - V_ref(x + s))))

    shifts = np.linspace(0.0, period, 241)
    errs = [sup_err(s) for s in shifts]
    k = int(np.argmin(errs))
    lo = shifts[max(0, k - 1)]
    hi = shifts[min(len(shifts) - 1, k + 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = sup_err(c), sup_err(d)
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = sup_err(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = sup_err(d)
    s_best = 0.5 * (a + b)
    return s_best, sup_err(s_best)


def susy_periodic_first(params: LameParams,
                        grid: Grid1D | None = None) -> PartnerResult:
    """First-order partner through the lowest edge state dn.

    The partner reproduces the potential displaced by a quarter period;
    the fitted displacement and its sup-norm error land in `asymptotics`.
    """
    if grid is None:
        grid = lame_cell_grid(params)
    model = lame_model(params)
    seed = _lame_edge_seed(params, "dn", grid)
    result = first_order_partner(model, seed)
    K = elliptic_K(params.m)
    shift, err = best_shift(result.V_new, lame_potential(params), params.period)
    result.asymptotics = {"shift": shift, "sup_error": err,
                          "quarter_period": K}
    return result


def susy_periodic_first_general(params: LameParams, epsilon: float,
                                c_plus: float = 1.0, c_minus: float = 1.0,
                                grid: Grid1D | None = None) -> PartnerResult:
    """First-order partner through a below-spectrum Bloch combination.

    A nodeless combination (both coefficients of one sign, energy under the
    lowest band) creates one bound level at epsilon on top of an unchanged
    asymptotic band structure.
    """
    if grid is None:
        grid = lame_cell_grid(params)
    if c_plus * c_minus <= 0:
        raise InconsistentSeedError(
            "below-band combinations need same-sign coefficients to stay "
            "nodeless")
    model = lame_model(params)
    seed = combination_seed(params, epsilon, c_plus, c_minus, grid)
    if seed.node_count:
        raise SingularTransformError(
            f"combination seed has {seed.node_count} nodes; pick an energy "
            "below the lowest band")
    return first_order_partner(model, seed)


def susy_periodic_second(params: LameParams,
                         epsilon1: float | None = None,
                         epsilon2: float | None = None,
                         seeds: tuple[SeedSolution, SeedSolution] | None = None,
                         grid: Grid1D | None = None,
                         edge_pair: bool = False) -> PartnerResult:
    """Second-order partner of the Lame potential.

    With edge_pair=True the exact (cn, sn) edge states are the seeds and
    the partner is the quarter-period displacement again (their Wronskian
    is dn, nodeless).  Otherwise two gap energies and their Bloch
    combination seeds create two interlaced bound levels.
    """
    if grid is None:
        grid = lame_cell_grid(params)
    model = lame_model(params)
    if edge_pair:
        s1 = _lame_edge_seed(params, "cn", grid)
        s2 = _lame_edge_seed(params, "sn", grid)
        result = second_order_real(model, s1, s2)
        shift, err = best_shift(result.V_new, lame_potential(params),
                                params.period)
        result.asymptotics = {"shift": shift, "sup_error": err,
                              "quarter_period": elliptic_K(params.m)}
        return result
    if seeds is not None:
        s1, s2 = seeds
        return second_order_real(model, s1, s2)
    if epsilon1 is None or epsilon2 is None:
        raise ValueError("need either two gap energies or explicit seeds")
    # The pair is admissible when the seeds' node counts differ by one, but
    # the sign returned for a Bloch eigenvector is not continuous in energy,
    # so the right relative sign of the second combination is found by trial.
    s1 = combination_seed(params, epsilon1, 1.0, 1.0, grid)
    last_error: SingularTransformError | None = None
    for c_minus in (1.0, -1.0):
        s2 = combination_seed(params, epsilon2, 1.0, c_minus, grid)
        try:
            return second_order_real(model, s1, s2)
        except SingularTransformError as exc:
            last_error = exc
    raise SingularTransformError(
        "no admissible relative sign for the two gap combinations; "
        f"last failure: {last_error}")


def tail_log_slope(state: SampledFunction, side: str, period: float,
                   n_cells: int = 4) -> float:
    """Log-slope of the per-cell envelope over the outermost cells of one side.

    The envelope is the maximum of |psi| over each period cell; fitting its
    logarithm against the cell-center coordinate (oriented toward the domain
    edge) is insensitive to the node dips of oscillating tails.  Distinctly
    negative slopes certify square-integrable decay; positive slopes flag
    growth.
    """
    x = state.x
    v = np.abs(np.asarray(state.values, dtype=complex))
    if side == "right":
        edge = x[-1]
        outward = lambda xc: xc
    elif side == "left":
        edge = x[0]
        outward = lambda xc: -xc
    else:
        raise ValueError("side must be 'left' or 'right'")
    if n_cells < 2:
        raise ValueError("need at least two cells for an envelope slope")
    centers, peaks = [], []
    for c in range(n_cells):
        lo = abs(edge) - (c + 1) * period
        hi = abs(edge) - c * period
        mask = (outward(x) >= lo) & (outward(x) < hi)
        if not np.any(mask):
            raise ValueError("tail window extends past the sampled domain")
        peak = float(np.max(v[mask]))
        if peak <= 0.0:
            raise ValueError("state vanishes over a whole tail cell")
        centers.append(0.5 * (lo + hi))
        peaks.append(math.log(peak))
    coeffs = np.polyfit(centers, peaks, 1)
    return float(coeffs[0])
