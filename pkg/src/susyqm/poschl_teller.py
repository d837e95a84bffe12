"""Trigonometric Poschl-Teller potential on (0, pi/2).

V(x) = (lam - 1) lam / (2 sin^2 x) + (nu - 1) nu / (2 cos^2 x), with the
exact spectrum E_n = (mu + 2 n)^2 / 2, mu = lam + nu.  The general solution
at any energy is hypergeometric in s = sin^2 x, which gives seed solutions
with analytically known boundary behaviour and node counts, plus a fast
series for the integral of u^2 needed by the confluent transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentSeedError, ParameterDegeneracyError
from .numerics import (
    DEFAULT_N_POINTS,
    Grid1D,
    SampledFunction,
    cumulative_quadrature,
    normalized,
    offset_grid,
)
from .special import gamma_fn, hyp2f1_array, hyp3f2_array, rgamma
from .susy import PotentialModel, SeedSolution

__all__ = [
    "PTParams",
    "PTSeedRecipe",
    "pt_potential",
    "pt_eigenvalue",
    "pt_model",
    "pt_grid",
    "pt_ab_coefficients",
    "pt_recipe_eigen",
    "pt_recipe_from_q",
    "pt_recipe_ab",
    "pt_node_prediction",
    "pt_seed",
    "pt_normalized_eigenfunction",
    "pt_confluent_w",
]


@dataclass(frozen=True)
class PTParams:
    """Strength parameters; both must exceed 1 so the walls are repulsive
    and the regular solutions decay as x^lam and (pi/2 - x)^nu."""

    lam: float
    nu: float

    def __post_init__(self):
        if not (self.lam > 1 and self.nu > 1):
            raise ValueError("both parameters must be > 1")

    @property
    def mu(self) -> float:
        return self.lam + self.nu


def pt_potential(params: PTParams):
    lam, nu = params.lam, params.nu

    def V(x):
        return (lam - 1) * lam / (2 * np.sin(x) ** 2) + (nu - 1) * nu / (2 * np.cos(x) ** 2)

    return V


def pt_eigenvalue(params: PTParams, n: int) -> float:
    return (params.mu + 2 * n) ** 2 / 2


def pt_model(params: PTParams) -> PotentialModel:
    return PotentialModel(
        potential=pt_potential(params),
        domain=(0.0, math.pi / 2),
        kind="bound",
        analytic_spectrum=lambda n: pt_eigenvalue(params, n),
        label=f"trigonometric Poschl-Teller lam={params.lam} nu={params.nu}")


def pt_grid(n_points: int = DEFAULT_N_POINTS) -> Grid1D:
    """Midpoint grid on (0, pi/2), keeping clear of both singular walls."""
    return offset_grid(0.0, math.pi / 2, n_points)


# ---------------------------------------------------------------------------
# the two hypergeometric branches and their connection coefficients

def _branch_parameters(params: PTParams, epsilon):
    se = np.sqrt(complex(epsilon) / 2.0)
    lam, nu = params.lam, params.nu
    mu = params.mu
    p1 = (mu / 2 + se, mu / 2 - se, lam + 0.5)
    p2 = ((1 + nu - lam) / 2 + se, (1 + nu - lam) / 2 - se, 1.5 - lam)
    return p1, p2


def pt_ab_coefficients(params: PTParams, epsilon):
    """Connection constants (a, b): the wall-divergent part of the two
    fundamental branches carries the coefficient A a + B b."""
    (a1, b1, c1), (a2, b2, c2) = _branch_parameters(params, epsilon)
    nu = params.nu
    lam = params.lam
    a = gamma_fn(lam + 0.5) * gamma_fn(nu - 0.5) * rgamma(a1) * rgamma(b1)
    b = gamma_fn(1.5 - lam) * gamma_fn(nu - 0.5) * rgamma(a2) * rgamma(b2)
    if abs(np.imag(complex(epsilon))) == 0:
        return complex(a).real, complex(b).real
    return complex(a), complex(b)


@dataclass(frozen=True)
class PTSeedRecipe:
    """Coefficients (A, B) of the two branches, with the implied boundary
    behaviour and, when known, the interior node count."""

    params: PTParams
    epsilon: complex
    A: complex
    B: complex
    boundary_tags: tuple[str, str]
    predicted_nodes: int | None = None
    q: float | None = None


def _levels_below(params: PTParams, epsilon: float) -> int:
    if epsilon <= pt_eigenvalue(params, 0):
        return 0
    return int(np.floor((math.sqrt(2 * epsilon) - params.mu) / 2.0 - 1e-12)) + 1


def _near_eigenvalue(params: PTParams, epsilon) -> bool:
    e = complex(epsilon)
    if e.imag != 0:
        return False
    n_guess = (math.sqrt(max(2 * e.real, 0.0)) - params.mu) / 2.0
    n0 = max(0, round(n_guess))
    return abs(e.real - pt_eigenvalue(params, n0)) <= 1e-9 * max(1.0, abs(e.real))


def pt_recipe_eigen(params: PTParams, n: int) -> PTSeedRecipe:
    """The n-th bound state as a transformation seed."""
    if n < 0:
        raise ValueError("level index must be >= 0")
    return PTSeedRecipe(params, pt_eigenvalue(params, n), 1.0, 0.0,
                        ("vanishes", "vanishes"), predicted_nodes=n)


def pt_recipe_from_q(params: PTParams, epsilon: float, q: float) -> PTSeedRecipe:
    """One-parameter family B = 1, A = -b/a + q.

    q = 0 cancels the divergence at the right wall (one-sided seed); q != 0
    diverges at both walls with i interior nodes for q > 0 and i + 1 for
    q < 0, where i counts the levels below epsilon.
    """
    if _near_eigenvalue(params, epsilon):
        raise InconsistentSeedError(
            "epsilon coincides with a bound level; use the eigenstate recipe")
    a, b = pt_ab_coefficients(params, epsilon)
    if a == 0:
        raise InconsistentSeedError("connection coefficient a vanished")
    A = -b / a + q
    i = _levels_below(params, float(np.real(epsilon)))
    if q == 0.0:
        tags = ("diverges", "vanishes")
        nodes = None
    else:
        tags = ("diverges", "diverges")
        nodes = i if q > 0 else i + 1
    return PTSeedRecipe(params, epsilon, A, 1.0, tags, predicted_nodes=nodes, q=q)


def pt_recipe_ab(params: PTParams, epsilon, A, B) -> PTSeedRecipe:
    """Arbitrary branch combination; tags follow the exact coefficients."""
    a, b = pt_ab_coefficients(params, epsilon)
    left = "diverges" if B != 0 else "vanishes"
    div = A * a + B * b
    scale = abs(A * a) + abs(B * b) + 1e-300
    right = "vanishes" if abs(div) <= 1e-12 * scale else "diverges"
    return PTSeedRecipe(params, epsilon, A, B, (left, right))


def pt_node_prediction(params: PTParams, epsilon: float, q: float) -> int:
    """Interior node count of the q-family seed."""
    i = _levels_below(params, epsilon)
    return i if q > 0 else i + 1


# ---------------------------------------------------------------------------
# sampling the solutions

def _branch_samples(grid: Grid1D, p_exp: float, nu: float, hyp_params, x=None):
    """sin^p cos^nu F(s) and its x-derivative for one branch."""
    a, b, c = hyp_params
    if x is None:
        x = grid.points()
    sn, cs = np.sin(x), np.cos(x)
    s = sn ** 2
    F, _, conv = hyp2f1_array(a, b, c, s)
    if not conv:
        raise InconsistentSeedError("hypergeometric series failed to converge")
    dF, _, conv = hyp2f1_array(a + 1, b + 1, c + 1, s)
    if not conv:
        raise InconsistentSeedError("hypergeometric series failed to converge")
    dF = (a * b / c) * dF
    pref = sn ** p_exp * cs ** nu
    vals = pref * F
    ders = (sn ** (p_exp - 1) * cs ** (nu - 1)
            * (p_exp * cs ** 2 - nu * sn ** 2) * F
            + 2.0 * sn ** (p_exp + 1) * cs ** (nu + 1) * dF)
    return vals, ders


def _mirror_branch_samples(x, p_exp: float, w_exp: float, hyp_params):
    """sin^p cos^w F(cos^2 x) and its x-derivative."""
    a, b, c = hyp_params
    sn, cs = np.sin(x), np.cos(x)
    t = cs ** 2
    F, _, conv = hyp2f1_array(a, b, c, t)
    dF, _, conv2 = hyp2f1_array(a + 1, b + 1, c + 1, t)
    if not (conv and conv2):
        raise InconsistentSeedError("hypergeometric series failed to converge")
    dF = (a * b / c) * dF
    vals = sn ** p_exp * cs ** w_exp * F
    ders = (sn ** (p_exp - 1) * cs ** (w_exp - 1)
            * (p_exp * cs ** 2 - w_exp * sn ** 2) * F
            - 2.0 * sn ** (p_exp + 1) * cs ** (w_exp + 1) * dF)
    return vals, ders


def _right_basis_coefficients(params: PTParams, epsilon):
    """Connection constants of the two fundamental branches onto the
    solution that stays bounded at the right wall."""
    lam, nu, mu = params.lam, params.nu, params.mu
    if abs((nu - 0.5) - round(nu - 0.5)) < 1e-12:
        raise ParameterDegeneracyError(
            "half-integer second strength index: the right-wall basis is "
            "logarithmic and not covered")
    se = np.sqrt(complex(epsilon) / 2.0)
    g = gamma_fn(0.5 - nu)
    r1 = (gamma_fn(lam + 0.5) * g
          * rgamma((1.0 + lam - nu) / 2.0 - se)
          * rgamma((1.0 + lam - nu) / 2.0 + se))
    r2 = (gamma_fn(1.5 - lam) * g
          * rgamma(1.0 - mu / 2.0 - se)
          * rgamma(1.0 - mu / 2.0 + se))
    if abs(np.imag(complex(epsilon))) == 0:
        return complex(r1).real, complex(r2).real
    return complex(r1), complex(r2)


def pt_seed(recipe: PTSeedRecipe, grid: Grid1D | None = None) -> SeedSolution:
    """Sample the recipe's solution with exact derivatives on the grid.

    Two-branch combinations are re-expanded on the right half of the
    domain in the basis attached to the right wall, with connection
    constants taken in closed form. Every hypergeometric series is then
    summed at argument below 1/2, and combinations tuned to cancel the
    wall divergence lose nothing to that cancellation.
    """
    if grid is None:
        grid = pt_grid()
    params, eps = recipe.params, recipe.epsilon
    p1, p2 = _branch_parameters(params, eps)
    lam, nu = params.lam, params.nu
    x = grid.points()
    split = recipe.B != 0
    if split:
        left = np.sin(x) ** 2 <= 0.5
        x_left = x[left]
    else:
        left = np.ones(grid.n_points, dtype=bool)
        x_left = x

    vals = np.zeros(grid.n_points, dtype=complex)
    ders = np.zeros(grid.n_points, dtype=complex)
    if recipe.A != 0 and x_left.size:
        v, d = _branch_samples(grid, lam, nu, p1, x=x_left)
        vals[left] += recipe.A * v
        ders[left] += recipe.A * d
    if recipe.B != 0 and x_left.size:
        v, d = _branch_samples(grid, 1.0 - lam, nu, p2, x=x_left)
        vals[left] += recipe.B * v
        ders[left] += recipe.B * d
    if split and np.any(~left):
        a_coef, b_coef = pt_ab_coefficients(params, eps)
        if recipe.q is not None:
            d_coef = recipe.q * a_coef
        else:
            d_coef = recipe.A * a_coef + recipe.B * b_coef
        r1, r2 = _right_basis_coefficients(params, eps)
        r_coef = recipe.A * r1 + recipe.B * r2
        a1, b1, c1 = p1
        x_right = x[~left]
        vd, dd = _mirror_branch_samples(
            x_right, lam, 1.0 - nu, (c1 - a1, c1 - b1, 1.5 - nu))
        vr, dr = _mirror_branch_samples(
            x_right, lam, nu, (a1, b1, nu + 0.5))
        vals[~left] = d_coef * vd + r_coef * vr
        ders[~left] = d_coef * dd + r_coef * dr
    if abs(np.imag(complex(eps))) == 0 and np.max(np.abs(vals.imag)) == 0.0:
        vals, ders = vals.real, ders.real
    u = SampledFunction(grid, vals, ders)
    nodes = recipe.predicted_nodes
    construction = (f"poschl-teller branch combination A={recipe.A} B={recipe.B}"
                    + (f" (q={recipe.q})" if recipe.q is not None else ""))
    return SeedSolution(eps, u, recipe.boundary_tags, nodes, construction)


def pt_normalized_eigenfunction(params: PTParams, n: int,
                                grid: Grid1D | None = None) -> SampledFunction:
    """Unit-norm bound state psi_n (normalized numerically on the grid)."""
    if grid is None:
        grid = pt_grid()
    mu = params.mu
    hyp = (-float(n), float(n) + mu, params.lam + 0.5)
    vals, ders = _branch_samples(grid, params.lam, params.nu, hyp)
    return normalized(SampledFunction(grid, np.real(vals), np.real(ders)))


# ---------------------------------------------------------------------------
# the confluent integral function

def _powerlaw_increments(vv, xx):
    """Integral of v over each cell of a decreasing abscissa array, with a
    local power-law model v ~ C x^p per cell (exact on wall asymptotics
    however fast they blow up) and a trapezoid fallback around zeros of v."""
    v0, v1 = vv[:-1], vv[1:]
    xi0, xi1 = xx[:-1], xx[1:]
    inc = 0.5 * (v0 + v1) * (xi0 - xi1)
    # near a node of v the fitted exponent blows up; the trapezoid
    # fallback is fine there because the increments are negligible
    ok = (v0 > 0.0) & (v1 > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.log(v1 / v0) / np.log(xi1 / xi0)
        pq = p + 1.0
        power = v0 * xi0 / pq * (1.0 - (xi1 / xi0) ** pq)
        loglaw = v0 * xi0 * np.log(xi0 / xi1)
    ok &= np.isfinite(p) & (np.abs(p) < 500.0)
    use_log = ok & (np.abs(pq) <= 1e-9)
    use_pow = ok & ~use_log
    inc[use_pow] = power[use_pow]
    inc[use_log] = loglaw[use_log]
    return inc


def pt_confluent_w(params: PTParams, epsilon: float,
                   grid: Grid1D | None = None,
                   s_switch: float = 0.35, tol: float = 1e-15,
                   max_outer: int = 4000):
    """Seed u (regular branch, A = 1, B = 0) together with
    w(x) = int_0^x u^2, evaluated by a hypergeometric series.

    The series runs over m with coefficients built from the branch
    parameters (a1)_m (b1)_m / ((c1)_m m!), each term carrying a 3F2 factor;
    it terminates after n + 1 terms when epsilon is the n-th eigenvalue.
    Away from termination the series is used for sin^2 x <= s_switch and a
    per-step power-law rule continues w to the right wall, where its local
    error is suppressed by the vanishing of every mapped state.
    """
    if grid is None:
        grid = pt_grid()
    eps = float(epsilon)
    lam, nu = params.lam, params.nu
    (a1, b1, c1), _ = _branch_parameters(params, eps)
    a1, b1 = complex(a1).real, complex(b1).real
    c1 = float(c1)
    se = math.sqrt(eps / 2.0)
    f1 = (1 + lam - nu) / 2.0 - se
    f2 = (1 + lam - nu) / 2.0 + se

    recipe = pt_recipe_ab(params, eps, 1.0, 0.0)
    if _near_eigenvalue(params, eps):
        n_level = round((math.sqrt(2 * eps) - params.mu) / 2.0)
        recipe = PTSeedRecipe(params, eps, 1.0, 0.0, ("vanishes", "vanishes"),
                              predicted_nodes=n_level)
    seed = pt_seed(recipe, grid)

    terminating = b1 <= 1e-9 and abs(b1 - round(b1)) <= 1e-9
    x = grid.points()
    s = np.sin(x) ** 2
    if terminating:
        mask = np.ones_like(s, dtype=bool)
    else:
        mask = s <= s_switch
    xs, ss = x[mask], s[mask]
    sn = np.sin(xs)

    total = np.zeros_like(xs)
    P = 1.0
    small_streak = 0
    for m in range(max_outer):
        if terminating and P == 0.0:
            break
        G, _, conv = hyp3f2_array(f1, f2, lam + m + 0.5,
                                  c1, lam + m + 1.5, ss)
        if not conv:
            raise InconsistentSeedError(
                "inner hypergeometric sum for the integral function "
                "failed to converge")
        term = (P / (2 * lam + 2 * m + 1)) * sn ** (2 * lam + 2 * m + 1) * G
        total += term
        tmax = np.max(np.abs(term))
        ref = np.max(np.abs(total))
        if ref > 0 and tmax <= tol * ref:
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
        P *= (a1 + m) * (b1 + m) / ((c1 + m) * (m + 1))
    else:
        raise InconsistentSeedError("integral-function series did not converge")

    w_vals = np.empty_like(s)
    w_vals[mask] = total
    if not terminating and not np.all(mask):
        # Continue past the series switch with a power-law quadrature rule in
        # the wall variable xi = pi/2 - x, on a refinement of the grid that is
        # geometric in xi. The integrand can grow by four orders of magnitude
        # per grid step near the wall, which makes polynomial rules (Simpson
        # included) undershoot catastrophically, while the power-law step is
        # exact on the wall asymptotics and the refinement drives its
        # curvature error a few orders below the verification tolerances.
        k = int(np.sum(mask)) - 1  # last series node
        refine = 24
        xi = np.pi / 2.0 - x
        steps = np.arange(k, grid.n_points - 1)
        ratios = (xi[steps + 1] / xi[steps])[:, None] ** (
            np.arange(refine)[None, :] / refine)
        xi_ref = np.append((xi[steps][:, None] * ratios).ravel(), xi[-1])
        v, _ = _branch_samples(grid, lam, nu, (a1, b1, c1),
                               x=np.pi / 2.0 - xi_ref)
        v = np.real(v) ** 2
        # Richardson extrapolation over two refinement levels removes the
        # quadratic-in-log-spacing bias of the power-law steps, which would
        # otherwise put a slope kink in the error of w at the series switch.
        fine = _powerlaw_increments(v, xi_ref).reshape(-1, refine).sum(axis=1)
        coarse = _powerlaw_increments(v[0::2], xi_ref[0::2]).reshape(
            -1, refine // 2).sum(axis=1)
        w_vals[k + 1:] = total[k] + np.cumsum(fine + (fine - coarse) / 3.0)
    w = SampledFunction(grid, w_vals, np.real(seed.u.values) ** 2)
    return seed, w
