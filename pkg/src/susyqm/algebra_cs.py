"""Ladder operators and coherent states for Hamiltonians with known
discrete spectra, including partners carrying created levels.

Three lowering-coefficient conventions are supported, all with r(0) = 0:

* intrinsic:   r(n) = exp(i alpha (E(n) - E(n-1))) sqrt(E(n) - E(0)),
  built directly from the spectrum;
* linearized:  r(n) = exp(i alpha f(n-1)) sqrt(n) with f(k) = E(k+1) - E(k),
  an oscillator-like deformation sharing the eigenbasis;
* natural:     the intrinsic coefficients dressed by
  sqrt(prod_i (E(n) - eps_i)(E(n-1) - eps_i)) on the sector mapped from the
  original Hamiltonian, with the created levels eps_i as annihilated
  singlet slots in front.

Coherent states are the normalized eigenstates of the lowering operator,
built slot by slot from c_m = z c_{m-1} / r(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import TruncationError
from .poschl_teller import PTParams, pt_eigenvalue

__all__ = [
    "SpectrumFunction",
    "LadderSpec",
    "CoherentState",
    "oscillator_spectrum",
    "pt_spectrum",
    "ladder_coefficient",
    "ladder_matrix",
    "kernel_degeneracy",
    "coherent_coefficients",
    "lowering_residual",
    "rho_moments",
    "reproducing_kernel",
    "linear_kernel_reference",
    "moment_check",
    "evolve_coherent",
    "evolution_check",
]


@dataclass(frozen=True)
class SpectrumFunction:
    """Discrete spectrum as a callable n -> E_n (n >= 0, increasing)."""

    energy: Callable[[int], float]
    label: str = ""

    def gap(self, n: int) -> float:
        return self.energy(n + 1) - self.energy(n)


def oscillator_spectrum(omega: float = 1.0) -> SpectrumFunction:
    return SpectrumFunction(lambda n: omega * (n + 0.5), f"oscillator omega={omega}")


def pt_spectrum(params: PTParams) -> SpectrumFunction:
    return SpectrumFunction(lambda n: pt_eigenvalue(params, n),
                            f"poschl-teller lam={params.lam} nu={params.nu}")


@dataclass(frozen=True)
class LadderSpec:
    """A lowering-operator convention over a level layout.

    For kind "natural", `new_levels` lists created singlet energies that
    occupy the lowest layout slots and are annihilated; the mapped spectrum
    follows above them.
    """

    kind: str
    spectrum: SpectrumFunction
    alpha: float = 0.0
    new_levels: tuple = ()

    def __post_init__(self):
        if self.kind not in ("intrinsic", "linearized", "natural"):
            raise ValueError(f"unknown ladder kind {self.kind!r}")
        if self.kind != "natural" and self.new_levels:
            raise ValueError("created levels only enter the natural ladder")

    @property
    def base_index(self) -> int:
        """First layout slot connected upward by the ladder chain."""
        return len(self.new_levels)

    def level_energy(self, n: int) -> float:
        k = len(self.new_levels)
        if n < k:
            return float(self.new_levels[n])
        return self.spectrum.energy(n - k)

    def r(self, n: int) -> complex:
        """Lowering coefficient: A |n> = r(n) |n-1>, with r(0) = 0."""
        if n <= 0:
            return 0.0
        E = self.spectrum.energy
        if self.kind == "intrinsic":
            mag = math.sqrt(E(n) - E(0))
            return mag * np.exp(1j * self.alpha * (E(n) - E(n - 1)))
        if self.kind == "linearized":
            return math.sqrt(n) * np.exp(1j * self.alpha * self.spectrum.gap(n - 1))
        k = len(self.new_levels)
        if n < k:
            return 0.0  # annihilated singlet slots
        j = n - k
        if j == 0:
            return 0.0
        dress = 1.0
        for eps in self.new_levels:
            dress *= (E(j) - eps) * (E(j - 1) - eps)
        if dress < 0:
            raise ValueError(
                "created levels interlace the mapped spectrum; the dressed "
                "coefficient is not real")
        mag = math.sqrt(dress) * math.sqrt(E(j) - E(0))
        return mag * np.exp(1j * self.alpha * (E(j) - E(j - 1)))


def ladder_coefficient(spec: LadderSpec, n: int) -> complex:
    return spec.r(n)


def ladder_matrix(spec: LadderSpec, size: int) -> np.ndarray:
    """Lowering operator on the first `size` layout slots."""
    L = np.zeros((size, size), dtype=complex)
    for n in range(1, size):
        L[n - 1, n] = spec.r(n)
    return L


def kernel_degeneracy(spec: LadderSpec, size: int = 12) -> int:
    """Dimension of the kernel of the truncated lowering operator."""
    L = ladder_matrix(spec, size)
    rank = np.linalg.matrix_rank(L)
    return size - int(rank)


# ---------------------------------------------------------------------------
# coherent states

@dataclass
class CoherentState:
    """Unit-norm eigenstate of the lowering operator, |z>.

    coefficients[j] multiplies layout slot base_index + j; slots below
    base_index carry coefficient zero.
    """

    z: complex
    spec: LadderSpec
    base_index: int
    coefficients: np.ndarray

    def energies(self) -> np.ndarray:
        return np.asarray([self.spec.level_energy(self.base_index + j)
                           for j in range(len(self.coefficients))])


def coherent_coefficients(spec: LadderSpec, z: complex,
                          tol: float = 1e-20, max_terms: int = 500) -> CoherentState:
    """Build |z> by the slot recurrence, truncated when the relative tail
    drops below tol (two consecutive terms)."""
    base = spec.base_index
    c = [1.0 + 0.0j]
    small = 0
    for m in range(base + 1, base + max_terms):
        r = spec.r(m)
        if r == 0:
            raise ValueError(
                f"ladder chain broken at slot {m}; coherent states live on "
                "the connected sector only")
        c.append(z * c[-1] / r)
        biggest = max(abs(v) for v in c)
        if abs(c[-1]) <= tol * biggest:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    else:
        raise TruncationError(
            f"coherent-state series not converged in {max_terms} slots")
    coeffs = np.asarray(c, dtype=complex)
    coeffs /= np.linalg.norm(coeffs)
    return CoherentState(complex(z), spec, base, coeffs)


def lowering_residual(state: CoherentState) -> float:
    """|| (A - z) |z> ||, including the truncated top slot."""
    c = state.coefficients
    base = state.base_index
    res = np.empty(len(c), dtype=complex)
    for j in range(len(c)):
        r_next = state.spec.r(base + j + 1)
        c_next = c[j + 1] if j + 1 < len(c) else 0.0
        res[j] = r_next * c_next - state.z * c[j]
    return float(np.linalg.norm(res))


def rho_moments(spec: LadderSpec, m_max: int) -> np.ndarray:
    """rho_m = prod_{k <= m} |r(base + k)|^2, rho_0 = 1."""
    base = spec.base_index
    rho = np.empty(m_max + 1)
    rho[0] = 1.0
    for m in range(1, m_max + 1):
        rho[m] = rho[m - 1] * abs(spec.r(base + m)) ** 2
    return rho


def reproducing_kernel(state1: CoherentState, state2: CoherentState) -> complex:
    """<z1 | z2> from the truncated coefficient vectors."""
    n = max(len(state1.coefficients), len(state2.coefficients))
    c1 = np.zeros(n, dtype=complex)
    c2 = np.zeros(n, dtype=complex)
    c1[:len(state1.coefficients)] = state1.coefficients
    c2[:len(state2.coefficients)] = state2.coefficients
    return complex(np.vdot(c1, c2))


def linear_kernel_reference(z1: complex, z2: complex) -> complex:
    return np.exp(-abs(z1) ** 2 / 2 + np.conj(z1) * z2 - abs(z2) ** 2 / 2)


def moment_check(m: int) -> tuple[float, float]:
    """Radial moment of the Gaussian resolution measure vs m!.

    int (d^2 z / pi) e^{-|z|^2} |z|^{2m} = m!, evaluated by quadrature.
    """
    numeric, _ = quad(lambda r: 2.0 * r ** (2 * m + 1) * np.exp(-r ** 2),
                      0.0, np.inf)
    return numeric, float(math.factorial(m))


# ---------------------------------------------------------------------------
# dynamics

def evolve_coherent(state: CoherentState, t: float) -> np.ndarray:
    """Coefficients of exp(-i H t) |z> in the layout basis."""
    return state.coefficients * np.exp(-1j * state.energies() * t)


def evolution_check(spec: LadderSpec, z: complex, t: float) -> dict:
    """Evolved state vs the rotated-label state exp(-i E_base t) |z e^{-i w t}>.

    identity_error vanishes for an equally spaced spectrum (w the level
    gap); autocorrelation |<z| z(t)>| is reported for any spectrum.
    """
    state = coherent_coefficients(spec, z)
    evolved = evolve_coherent(state, t)
    base = spec.base_index
    w = spec.spectrum.gap(0)
    rotated = coherent_coefficients(spec, z * np.exp(-1j * w * t))
    n = max(len(evolved), len(rotated.coefficients))
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[:len(evolved)] = evolved
    b[:len(rotated.coefficients)] = rotated.coefficients
    phase = np.exp(-1j * spec.level_energy(base) * t)
    identity_error = float(np.linalg.norm(a - phase * b))
    auto = abs(np.vdot(state.coefficients,
                       evolved[:len(state.coefficients)]))
    return {"identity_error": identity_error, "autocorrelation": float(auto)}
