"""Command-line front end emitting tabular data for the library workflows.

Four subcommands cover the package: `pt-partner` builds first- and
second-order partners of the trigonometric Poschl-Teller potential,
`bands` tabulates the Floquet discriminant and band edges of a periodic
potential, `lame-susy` runs the periodic transforms of the Lame potential,
and `coherent` builds ladder coherent states.  Output is data (csv or
json), not images; a summary with verification residuals is printed and
the exit code reports the outcome: 0 all checks passed, 2 invalid
parameters, 3 singular transform, 4 a residual exceeded its threshold,
1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .algebra_cs import (
    LadderSpec,
    SpectrumFunction,
    coherent_coefficients,
    kernel_degeneracy,
    lowering_residual,
    oscillator_spectrum,
    pt_spectrum,
    reproducing_kernel,
)
from .errors import SingularTransformError, SusyError, ValidationError
from .numerics import Grid1D, l2_norm, offset_grid, potential_callable
from .periodic import (
    LameParams,
    band_edges,
    best_shift,
    discriminant,
    lame_band_edge_energies,
    lame_cell_grid,
    lame_model,
    lame_potential,
    susy_periodic_first,
    susy_periodic_first_general,
    susy_periodic_second,
    tail_log_slope,
)
from .poschl_teller import (
    PTParams,
    pt_confluent_w,
    pt_eigenvalue,
    pt_grid,
    pt_model,
    pt_normalized_eigenfunction,
    pt_potential,
    pt_recipe_ab,
    pt_recipe_eigen,
    pt_recipe_from_q,
    pt_seed,
)
from .susy import (
    first_order_partner,
    second_order_complex,
    second_order_confluent,
    second_order_real,
    verify_intertwining,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_SINGULAR = 3
EXIT_RESIDUAL = 4

INTERTWINING_THRESHOLD = 1e-5
EDGE_THRESHOLD = 1e-4
SHIFT_THRESHOLD = 1e-7
COHERENT_THRESHOLD = 1e-8
DET_THRESHOLD = 1e-9


class ResidualFailure(Exception):
    """A verification residual exceeded its threshold."""


def _parse_complex(text: str) -> complex:
    """Accept both 1.5i and 1.5j imaginary-unit spellings."""
    cleaned = text.strip().replace("i", "j").replace(" ", "")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {text!r}") from exc


def _load_config(path: str) -> dict:
    """key=value per line; blank lines and # comments ignored."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(
                    f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _merge_config(args: argparse.Namespace, parser_actions) -> None:
    """Fill options the user left unset from the config file (flags win)."""
    if not getattr(args, "config", None):
        return
    file_values = _load_config(args.config)
    converters = {a.dest: a.type for a in parser_actions}
    aliases = {"lambda": "lam"}
    for key, raw in file_values.items():
        key = aliases.get(key, key)
        if key == "config" or not hasattr(args, key):
            continue
        if getattr(args, key) is not None:
            continue  # an explicit flag wins over the file
        conv = converters.get(key)
        setattr(args, key, conv(raw) if conv is not None else raw)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def _print(quiet: bool, *parts) -> None:
    if not quiet:
        print(*parts)


# ---------------------------------------------------------------------------
# output writers

def _as_real_columns(columns: dict) -> dict:
    """Split complex-valued columns into _re/_im pairs."""
    out = {}
    for name, values in columns.items():
        arr = np.asarray(values)
        if np.iscomplexobj(arr):
            if np.max(np.abs(arr.imag)) == 0.0:
                out[name] = arr.real
            else:
                out[name + "_re"] = arr.real
                out[name + "_im"] = arr.imag
        else:
            out[name] = arr
    return out


def write_table(path: str, fmt: str, meta: dict, columns: dict) -> None:
    columns = _as_real_columns(columns)
    if fmt == "json":
        payload = {"meta": meta,
                   "columns": {k: np.asarray(v).tolist()
                               for k, v in columns.items()}}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        return
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    n_rows = max((len(a) for a in arrays), default=0)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            cells = ["" if i >= len(a) else f"{a[i]:.15g}" for a in arrays]
            fh.write(",".join(cells) + "\n")


def _output_format(args) -> str:
    if args.format is not None:
        return args.format
    if args.out and args.out.endswith(".json"):
        return "json"
    return "csv"


# ---------------------------------------------------------------------------
# pt-partner

def _pt_first_order_seed(params: PTParams, args):
    case = args.case
    if case == "delete-ground":
        return pt_recipe_eigen(params, 0)
    _require(args.epsilon is not None, f"case {case!r} needs --epsilon")
    eps = args.epsilon
    _require(abs(eps.imag) == 0.0, "first-order cases use a real epsilon")
    if case == "isospectral":
        q = 0.0 if args.q is None else args.q
        _require(q == 0.0, "the isospectral case uses q = 0")
        return pt_recipe_from_q(params, eps.real, 0.0)
    if case == "create-level":
        _require(args.q is not None and args.q != 0.0,
                 "the create-level case needs a nonzero --q")
        return pt_recipe_from_q(params, eps.real, args.q)
    raise ValidationError(
        f"unknown first-order case {case!r}; pick delete-ground, "
        "isospectral or create-level")


def _pt_second_order(params: PTParams, model, grid, args):
    case = args.case
    if case == "delete-two":
        _require(args.epsilon is not None and args.epsilon2 is not None,
                 "delete-two needs --epsilon and --epsilon2 (two eigenvalues)")
        n1 = _pt_level_index(params, args.epsilon.real)
        n2 = _pt_level_index(params, args.epsilon2.real)
        _require(abs(n1 - n2) == 1, "delete-two needs two adjacent levels")
        s1 = pt_seed(pt_recipe_eigen(params, max(n1, n2)), grid)
        s2 = pt_seed(pt_recipe_eigen(params, min(n1, n2)), grid)
        return second_order_real(model, s1, s2)
    if case == "create-two" or case == "move-level":
        _require(args.epsilon is not None and args.epsilon2 is not None,
                 f"{case} needs --epsilon and --epsilon2")
        if _is_pt_eigenvalue(params, args.epsilon.real):
            s1 = pt_seed(pt_recipe_eigen(
                params, _pt_level_index(params, args.epsilon.real)), grid)
        else:
            _require(args.q is not None, f"{case} needs --q for epsilon")
            s1 = pt_seed(pt_recipe_from_q(params, args.epsilon.real, args.q),
                         grid)
        _require(args.q2 is not None, f"{case} needs --q2 for epsilon2")
        s2 = pt_seed(pt_recipe_from_q(params, args.epsilon2.real, args.q2),
                     grid)
        return second_order_real(model, s1, s2)
    if case == "confluent":
        _require(args.epsilon is not None, "confluent needs --epsilon")
        seed, w = pt_confluent_w(params, args.epsilon.real, grid=grid)
        w0 = 0.0 if args.w0 is None else args.w0
        return second_order_confluent(model, seed, w0=w0, w_samples=w)
    if case == "complex-pair":
        _require(args.epsilon is not None and args.epsilon.imag != 0.0,
                 "complex-pair needs --epsilon with a nonzero imaginary part")
        A = 1.0 if args.A is None else args.A
        B = 0.0 if args.B is None else args.B
        seed = pt_seed(pt_recipe_ab(params, args.epsilon, A, B), grid)
        return second_order_complex(model, seed)
    raise ValidationError(
        f"unknown second-order case {case!r}; pick delete-two, create-two, "
        "move-level, confluent or complex-pair")


def _pt_level_index(params: PTParams, energy: float) -> int:
    n = round((math.sqrt(2.0 * energy) - params.mu) / 2.0)
    _require(n >= 0 and abs(pt_eigenvalue(params, n) - energy) < 1e-9,
             f"{energy} is not an eigenvalue of this potential")
    return int(n)


def _is_pt_eigenvalue(params: PTParams, energy: float) -> bool:
    if energy <= 0:
        return False
    n = round((math.sqrt(2.0 * energy) - params.mu) / 2.0)
    return n >= 0 and abs(pt_eigenvalue(params, int(n)) - energy) < 1e-9


def cmd_pt_partner(args) -> int:
    _require(args.lam is not None and args.nu is not None,
             "pt-partner needs --lambda and --nu")
    _require(args.lam > 1, f"need lambda > 1 for a two-wall potential "
             f"(got lambda = {args.lam:g})")
    _require(args.nu > 1, f"need nu > 1 for a two-wall potential "
             f"(got nu = {args.nu:g})")
    _require(args.order in (1, 2), "--order must be 1 or 2")
    _require(args.out, "pt-partner needs --out")
    params = PTParams(lam=args.lam, nu=args.nu)
    n_points = args.seed_grid or 2001
    grid = pt_grid(n_points)
    model = pt_model(params)

    if args.order == 1:
        recipe = _pt_first_order_seed(params, args)
        seed = pt_seed(recipe, grid)
        result = first_order_partner(model, seed)
    else:
        result = _pt_second_order(params, model, grid, args)

    x = grid.points()
    columns = {"x": x, "V0": model.potential(x), "V_new": result.V_new.values}
    for k, state in enumerate(result.new_states):
        values = np.asarray(state.state.values)
        if state.normalizable:
            values = values / l2_norm(state.state)
        columns[f"psi_new_{k}"] = values

    change = result.spectral_change
    _print(args.quiet, f"case: {result.case} (order {result.order})")
    _print(args.quiet, f"spectral change: {change.kind}"
           + (f" at {change.energies}" if change.energies else ""))
    for state in result.new_states:
        _print(args.quiet, f"  new state at E = {state.energy}"
               f" (normalizable: {state.normalizable})")

    check_levels = [pt_eigenvalue(params, k) for k in range(3)]
    solutions = [pt_normalized_eigenfunction(params, k, grid=grid)
                 for k in range(3)]
    residual = verify_intertwining(model, result, check_levels,
                                   test_solutions=solutions)
    ok = residual <= INTERTWINING_THRESHOLD
    _print(args.quiet, f"intertwining residual: {residual:.3e} "
           f"(threshold {INTERTWINING_THRESHOLD:g}) "
           f"{'PASS' if ok else 'FAIL'}")

    meta = _echo_config(args)
    meta["spectral_change"] = change.kind
    meta["energies"] = [repr(e) for e in change.energies]
    meta["intertwining_residual"] = residual
    write_table(args.out, _output_format(args), meta, columns)
    _print(args.quiet, f"wrote {args.out}")
    if not ok:
        raise ResidualFailure(
            f"intertwining residual {residual:.3e} above "
            f"{INTERTWINING_THRESHOLD:g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bands

def _band_potential(args):
    if args.potential == "lame":
        _require(args.m is not None, "--potential lame needs --m")
        _require(0.0 < args.m < 1.0,
                 f"need 0 < m < 1 (got m = {args.m:g})")
        params = LameParams(m=args.m)
        return lame_potential(params), params.period, f"lame m={args.m:g}"
    if args.potential == "sin2":
        strength = 5.0 if args.strength is None else args.strength
        return (lambda x: strength * np.sin(np.asarray(x)) ** 2, math.pi,
                f"{strength:g}*sin^2(x)")
    if args.potential == "file":
        _require(args.potential_file is not None,
                 "--potential file needs --potential-file")
        _require(args.period is not None,
                 "--potential file needs --period")
        with open(args.potential_file, "r", encoding="utf-8") as fh:
            expression = fh.read().strip()
        namespace = {"np": np, "sin": np.sin, "cos": np.cos, "exp": np.exp,
                     "pi": math.pi}

        def V(x):
            local = dict(namespace)
            local["x"] = np.asarray(x, dtype=float)
            return np.broadcast_to(
                np.asarray(eval(expression, {"__builtins__": {}}, local),
                           dtype=float), np.shape(local["x"])).copy()

        return V, args.period, f"file:{args.potential_file}"
    raise ValidationError(
        f"unknown potential {args.potential!r}; pick lame, sin2 or file")


def cmd_bands(args) -> int:
    _require(args.out, "bands needs --out")
    _require(args.emin is not None and args.emax is not None,
             "bands needs --emin and --emax")
    _require(args.emax > args.emin, "--emax must exceed --emin")
    V, period, label = _band_potential(args)
    n_scan = args.points or 600

    energies = np.linspace(args.emin, args.emax, n_scan)
    data = discriminant(V, period, energies)
    det_ok = data.det_residual <= DET_THRESHOLD
    _print(args.quiet, f"potential: {label}, period {period:.12g}")
    _print(args.quiet, f"transfer-matrix det residual: "
           f"{data.det_residual:.3e} (threshold {DET_THRESHOLD:g}) "
           f"{'PASS' if det_ok else 'FAIL'}")

    structure = band_edges(V, period, (args.emin, args.emax), n_scan=n_scan)
    open_edges = [e for e in structure.edges if not e.closed_gap]
    for edge in structure.edges:
        tag = "D=+2" if edge.kind == "periodic" else "D=-2"
        extra = " (closed gap)" if edge.closed_gap else ""
        _print(args.quiet, f"  edge {edge.energy:.12g}  {tag}{extra}")
    if not open_edges:
        _print(args.quiet, "no open gaps in the window")

    meta = _echo_config(args)
    meta["period"] = period
    meta["det_residual"] = data.det_residual
    meta["edges"] = [{"energy": e.energy, "kind": e.kind,
                      "closed_gap": e.closed_gap} for e in structure.edges]
    meta["bands"] = structure.bands
    columns = {"E": energies, "D": np.real(data.discriminant)}
    write_table(args.out, _output_format(args), meta, columns)
    _print(args.quiet, f"wrote {args.out}")
    if not det_ok:
        raise ResidualFailure(
            f"det residual {data.det_residual:.3e} above {DET_THRESHOLD:g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# lame-susy

def cmd_lame_susy(args) -> int:
    _require(args.out, "lame-susy needs --out")
    _require(args.m is not None, "lame-susy needs --m")
    _require(0.0 < args.m < 1.0, f"need 0 < m < 1 (got m = {args.m:g})")
    params = LameParams(m=args.m)
    T = params.period
    points_per_cell = max(60, (args.seed_grid or 9600) // 32)
    grid = lame_cell_grid(params, n_cells_per_side=16,
                          points_per_cell=points_per_cell)
    case = args.case
    failures = []

    if case == "dn":
        result = susy_periodic_first(params, grid=grid)
    elif case == "edge-pair":
        result = susy_periodic_second(params, grid=grid, edge_pair=True)
    elif case == "create":
        _require(args.epsilon is not None, "case create needs --epsilon")
        eps = args.epsilon.real
        _require(eps < lame_band_edge_energies(params)[0],
                 "the created level must sit below the lowest band edge "
                 f"({lame_band_edge_energies(params)[0]:g})")
        result = susy_periodic_first_general(params, eps, grid=grid)
    elif case == "create-two":
        _require(args.epsilon is not None and args.epsilon2 is not None,
                 "case create-two needs --epsilon and --epsilon2")
        result = susy_periodic_second(params, args.epsilon.real,
                                      args.epsilon2.real, grid=grid)
    else:
        raise ValidationError(
            f"unknown case {case!r}; pick dn, edge-pair, create or "
            "create-two")

    x = grid.points()
    V0 = lame_potential(params)
    columns = {"x": x, "V0": V0(x), "V_new": result.V_new.values}
    meta = _echo_config(args)
    meta["period"] = T

    _print(args.quiet, f"case: {result.case} (order {result.order})")
    change = result.spectral_change
    _print(args.quiet, f"spectral change: {change.kind}"
           + (f" at {change.energies}" if change.energies else ""))

    if case in ("dn", "edge-pair"):
        shift, sup_err = best_shift(result.V_new, V0, T)
        _print(args.quiet, f"self-isospectral shift: {shift:.12g} "
               f"(half period {T / 2.0:.12g}), "
               f"sup deviation {sup_err:.3e} "
               f"(threshold {SHIFT_THRESHOLD:g}) "
               f"{'PASS' if sup_err <= SHIFT_THRESHOLD else 'FAIL'}")
        meta["shift"] = shift
        meta["shift_sup_error"] = sup_err
        if sup_err > SHIFT_THRESHOLD:
            failures.append(f"shift deviation {sup_err:.3e}")
    else:
        for k, state in enumerate(result.new_states):
            values = np.asarray(state.state.values)
            if state.normalizable:
                values = values / l2_norm(state.state)
            columns[f"psi_new_{k}"] = values
            slopes = (tail_log_slope(state.state, "left", T),
                      tail_log_slope(state.state, "right", T))
            decaying = slopes[0] < -1e-3 and slopes[1] < -1e-3
            _print(args.quiet, f"  bound state at E = {state.energy}: "
                   f"tail log-slopes {slopes[0]:.4f}/{slopes[1]:.4f} "
                   f"{'PASS' if decaying else 'FAIL'}")
            if not decaying:
                failures.append(f"state at {state.energy} does not decay")
        exact_edges = lame_band_edge_energies(params)
        found = band_edges(potential_callable(result.V_new), T,
                           (0.05 * params.m, 1.3),
                           x_start=float(x[0]))
        measured = [e.energy for e in found.edges[:3]]
        errors = [abs(a - b) for a, b in zip(measured, exact_edges)]
        worst = max(errors) if errors else math.inf
        edges_ok = len(measured) == 3 and worst <= EDGE_THRESHOLD
        _print(args.quiet, f"far-cell band edges: "
               + ", ".join(f"{e:.8f}" for e in measured)
               + f" (exact {exact_edges}), worst error "
               f"{worst:.2e} {'PASS' if edges_ok else 'FAIL'}")
        meta["far_cell_edges"] = measured
        if not edges_ok:
            failures.append(f"band-edge error {worst:.2e}")

    write_table(args.out, _output_format(args), meta, columns)
    _print(args.quiet, f"wrote {args.out}")
    if failures:
        raise ResidualFailure("; ".join(failures))
    return EXIT_OK


# ---------------------------------------------------------------------------
# coherent

def cmd_coherent(args) -> int:
    _require(args.out, "coherent needs --out")
    if args.model == "oscillator":
        spectrum = oscillator_spectrum()
    elif args.model == "pt":
        _require(args.lam is not None and args.nu is not None,
                 "--model pt needs --lambda and --nu")
        _require(args.lam > 1 and args.nu > 1,
                 "need lambda > 1 and nu > 1")
        spectrum = pt_spectrum(PTParams(lam=args.lam, nu=args.nu))
    else:
        raise ValidationError(
            f"unknown model {args.model!r}; pick oscillator or pt")

    kind = {"linear": "linearized"}.get(args.kind, args.kind)
    new_levels = ()
    if kind == "natural":
        _require(args.epsilon is not None and args.epsilon2 is not None,
                 "the natural kind needs --epsilon and --epsilon2 "
                 "(the two created levels)")
        new_levels = (args.epsilon.real, args.epsilon2.real)
    try:
        spec = LadderSpec(kind, spectrum, alpha=args.alpha or 0.0,
                          new_levels=new_levels)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc

    z = args.z if args.z is not None else complex(1.0)
    state = coherent_coefficients(spec, z)
    residual = lowering_residual(state)
    ok = residual <= COHERENT_THRESHOLD
    _print(args.quiet, f"ladder kind: {kind} on {spectrum.label}")
    _print(args.quiet, f"eigenvalue residual at z = {z}: {residual:.3e} "
           f"(threshold {COHERENT_THRESHOLD:g}) {'PASS' if ok else 'FAIL'}")
    degeneracy = kernel_degeneracy(spec)
    _print(args.quiet, f"kernel degeneracy at z = 0: {degeneracy}")

    m_index = np.arange(state.base_index,
                        state.base_index + len(state.coefficients))
    columns = {"m": m_index.astype(float),
               "abs_c_m": np.abs(state.coefficients)}

    z_samples = np.linspace(-2.0, 2.0, 21)
    kernel = [reproducing_kernel(state, coherent_coefficients(spec, zj))
              for zj in z_samples]
    columns_kernel = {"z_re": z_samples,
                      "kernel_abs": np.abs(np.asarray(kernel))}

    meta = _echo_config(args)
    meta["residual"] = residual
    meta["degeneracy"] = degeneracy
    n_pad = max(len(m_index), len(z_samples))
    merged = dict(columns)
    merged.update(columns_kernel)
    write_table(args.out, _output_format(args), meta, merged)
    _print(args.quiet, f"wrote {args.out} ({n_pad} rows)")
    if not ok:
        raise ResidualFailure(
            f"eigenvalue residual {residual:.3e} above "
            f"{COHERENT_THRESHOLD:g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring

def _echo_config(args) -> dict:
    skip = {"func", "quiet"}
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        if isinstance(value, complex):
            value = repr(value)
        echo[key] = value
    return echo


def _add_common(sub) -> None:
    sub.add_argument("--out", help="output table path")
    sub.add_argument("--format", choices=("csv", "json"),
                     help="table format (default: by extension, else csv)")
    sub.add_argument("--config",
                     help="key=value file supplying defaults; flags win")
    sub.add_argument("--seed-grid", dest="seed_grid", type=int,
                     help="grid resolution (number of sample points)")
    sub.add_argument("--quiet", action="store_true",
                     help="suppress the printed summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susy",
        description="Partner potentials, band structure and coherent states "
                    "of exactly solvable one-dimensional Hamiltonians.")
    commands = parser.add_subparsers(dest="command", required=True)

    pt = commands.add_parser(
        "pt-partner", help="SUSY partners of the Poschl-Teller potential")
    pt.add_argument("--lambda", dest="lam", type=float,
                    help="strength index of the left wall")
    pt.add_argument("--nu", type=float, help="strength index of the right wall")
    pt.add_argument("--order", type=int, default=1,
                    help="transformation order, 1 or 2")
    pt.add_argument("--case", default="delete-ground",
                    help="order 1: delete-ground | isospectral | create-level;"
                         " order 2: delete-two | create-two | move-level |"
                         " confluent | complex-pair")
    pt.add_argument("--epsilon", type=_parse_complex,
                    help="factorization energy (accepts a+bi)")
    pt.add_argument("--epsilon2", type=_parse_complex,
                    help="second factorization energy")
    pt.add_argument("--q", type=float,
                    help="divergent-part weight of the first seed")
    pt.add_argument("--q2", type=float,
                    help="divergent-part weight of the second seed")
    pt.add_argument("--w0", type=float,
                    help="integration constant of the confluent transform")
    pt.add_argument("--A", type=float, help="first branch coefficient")
    pt.add_argument("--B", type=float, help="second branch coefficient")
    _add_common(pt)
    pt.set_defaults(func=cmd_pt_partner)

    bands = commands.add_parser(
        "bands", help="Floquet discriminant and band edges")
    bands.add_argument("--potential", default="sin2",
                       help="lame | sin2 | file")
    bands.add_argument("--m", type=float, help="elliptic parameter for lame")
    bands.add_argument("--strength", type=float,
                       help="prefactor of sin^2 (default 5)")
    bands.add_argument("--potential-file", dest="potential_file",
                       help="file holding an expression in x")
    bands.add_argument("--period", type=float,
                       help="period for --potential file")
    bands.add_argument("--emin", type=float, help="scan window lower end")
    bands.add_argument("--emax", type=float, help="scan window upper end")
    bands.add_argument("--points", type=int,
                       help="number of scan energies (default 600)")
    _add_common(bands)
    bands.set_defaults(func=cmd_bands)

    lame = commands.add_parser(
        "lame-susy", help="periodic SUSY transforms of the Lame potential")
    lame.add_argument("--m", type=float, help="elliptic parameter")
    lame.add_argument("--case", default="dn",
                      help="dn | edge-pair | create | create-two")
    lame.add_argument("--epsilon", type=_parse_complex,
                      help="gap or below-band energy")
    lame.add_argument("--epsilon2", type=_parse_complex,
                      help="second gap energy for create-two")
    _add_common(lame)
    lame.set_defaults(func=cmd_lame_susy)

    coherent = commands.add_parser(
        "coherent", help="ladder coherent states")
    coherent.add_argument("--model", default="oscillator",
                          help="oscillator | pt")
    coherent.add_argument("--lambda", dest="lam", type=float,
                          help="strength index for --model pt")
    coherent.add_argument("--nu", type=float,
                          help="strength index for --model pt")
    coherent.add_argument("--kind", default="intrinsic",
                          help="intrinsic | linear | natural")
    coherent.add_argument("--alpha", type=float,
                          help="phase parameter of the ladder coefficients")
    coherent.add_argument("--z", type=_parse_complex,
                          help="coherent-state label (accepts a+bi)")
    coherent.add_argument("--epsilon", type=_parse_complex,
                          help="first created level for --kind natural")
    coherent.add_argument("--epsilon2", type=_parse_complex,
                          help="second created level for --kind natural")
    _add_common(coherent)
    coherent.set_defaults(func=cmd_coherent)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args, parser._subparsers._group_actions[0]
                      .choices[args.command]._actions)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SingularTransformError as exc:
        print(f"singular transform: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ResidualFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL
    except SusyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
