"""Special functions used by the solvable models.

Hand-rolled implementations with controlled domains:

* gamma_fn: Lanczos rational approximation (g = 7, 9 terms), complex capable,
  roughly 1e-13 relative accuracy on the strip we use.
* gauss_2f1: power series; for real arguments in (1/2, 1) the series is slow
  or divergent, so the argument is first mapped to 1 - x with the standard
  two-term connection formula.  Terminating (polynomial) cases are summed
  directly for any argument.
* hyp_3f2: plain power series on |x| < 1 with a term cap; divergence is
  reported through the converged flag rather than an exception.
* jacobi_elliptic / elliptic_K: descending Landen recursion driven by the
  arithmetic-geometric mean (A&S 16.4 / DLMF 22.20(ii)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDegeneracyError

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass
class SpecialFunctionResult:
    value: complex
    terms_used: int
    converged: bool


def gamma_fn(z) -> complex:
    """Gamma function for complex argument (Lanczos approximation)."""
    z = complex(z)
    if z.real < 0.5:
        return math.pi / (np.sin(np.pi * z) * gamma_fn(1.0 - z))
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc = acc + _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * np.exp(-t) * acc


def rgamma(z) -> complex:
    """1/Gamma(z); exactly zero at the poles z = 0, -1, -2, ..."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-12:
        return 0.0
    return 1.0 / gamma_fn(z)


def _nonpositive_int(z) -> bool:
    z = complex(z)
    return z.imag == 0 and z.real <= 1e-12 and abs(z.real - round(z.real)) < 1e-10


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1

_MAX_TERMS_2F1 = 3000


def _hyp2f1_raw(a, b, c, x, max_terms=_MAX_TERMS_2F1, tol=1e-16):
    """Power series sum_k (a)_k (b)_k / ((c)_k k!) x^k, vectorized over x.

    Returns (values, terms_used, converged).  Terminating series are summed
    exactly; otherwise convergence is declared when the ratio of the latest
    term to the running total drops below tol for two consecutive terms.
    """
    x = np.asarray(x, dtype=float)
    complex_params = any(abs(complex(p).imag) > 0 for p in (a, b, c))
    dtype = complex if complex_params else float
    a, b, c = (complex(a), complex(b), complex(c)) if complex_params else (
        float(np.real(a)), float(np.real(b)), float(np.real(c)))

    n_cut = None
    for p in (a, b):
        if _nonpositive_int(p):
            k = int(round(-np.real(p)))
            n_cut = k if n_cut is None else min(n_cut, k)
    term = np.ones(x.shape, dtype=dtype)
    total = term.copy()
    small_streak = 0
    k = 0
    converged = False
    limit = (n_cut + 1) if n_cut is not None else max_terms
    while k < limit:
        if _nonpositive_int(c + k) and (n_cut is None or k < n_cut):
            raise ParameterDegeneracyError(
                f"2F1 lower parameter c={c} hits a non-positive integer")
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * x
        total = total + term
        k += 1
        if n_cut is None:
            scale = np.max(np.abs(total))
            if np.max(np.abs(term)) <= tol * max(scale, 1e-300):
                small_streak += 1
                if small_streak >= 2:
                    converged = True
                    break
            else:
                small_streak = 0
    if n_cut is not None:
        converged = True
    return total, k, converged


def hyp2f1_array(a, b, c, x, max_terms=_MAX_TERMS_2F1):
    """2F1(a, b; c; x) for a real array 0 <= x < 1 (or any x if terminating).

    For x > 1/2 the 1-x connection formula is applied so every series runs at
    argument <= 1/2.  Needs c - a - b non-integer in that region (the
    logarithmic degenerate case is not implemented).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x >= 1.0) or np.any(x < 0.0):
        if not (_nonpositive_int(a) or _nonpositive_int(b)):
            raise ValueError("argument must lie in [0, 1) for non-terminating 2F1")
    if _nonpositive_int(a) or _nonpositive_int(b):
        vals, k, conv = _hyp2f1_raw(a, b, c, x, max_terms)
        return vals, k, conv

    out = np.empty(x.shape, dtype=complex)
    terms = 0
    converged = True
    low = x <= 0.5
    if np.any(low):
        vals, k, conv = _hyp2f1_raw(a, b, c, x[low], max_terms)
        out[low] = vals
        terms = max(terms, k)
        converged &= conv
    if np.any(~low):
        cab = c - a - b
        if abs(complex(cab).imag) < 1e-13 and abs(np.real(cab) - round(np.real(cab))) < 1e-8:
            raise ParameterDegeneracyError(
                "c - a - b is an integer: the 1-x connection formula degenerates")
        xm = 1.0 - x[~low]
        g1 = gamma_fn(c) * gamma_fn(cab) * rgamma(c - a) * rgamma(c - b)
        g2 = gamma_fn(c) * gamma_fn(-cab) * rgamma(a) * rgamma(b)
        f1, k1, conv1 = _hyp2f1_raw(a, b, a + b - c + 1.0, xm, max_terms)
        f2, k2, conv2 = _hyp2f1_raw(c - a, c - b, c - a - b + 1.0, xm, max_terms)
        out[~low] = g1 * f1 + g2 * xm ** complex(cab) * f2
        terms = max(terms, k1, k2)
        converged &= conv1 and conv2
    if np.all(np.abs(out.imag) == 0.0):
        out = out.real
    return out, terms, converged


def gauss_2f1(a, b, c, x) -> SpecialFunctionResult:
    """Gauss hypergeometric function at a single real argument."""
    vals, k, conv = hyp2f1_array(a, b, c, np.asarray([float(x)]))
    v = vals[0]
    return SpecialFunctionResult(complex(v) if np.iscomplexobj(vals) else float(v), k, conv)


# ---------------------------------------------------------------------------
# generalized hypergeometric 3F2

_MAX_TERMS_3F2 = 4000


def hyp3f2_array(a1, a2, a3, b1, b2, x, max_terms=_MAX_TERMS_3F2, tol=1e-14):
    """3F2 power series, vectorized over real x with |x| < 1.

    Returns (values, terms_used, converged).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    params = (a1, a2, a3, b1, b2)
    complex_params = any(abs(complex(p).imag) > 0 for p in params)
    dtype = complex if complex_params else float
    term = np.ones(x.shape, dtype=dtype)
    total = term.copy()
    n_cut = None
    for p in (a1, a2, a3):
        if _nonpositive_int(p):
            k = int(round(-np.real(complex(p))))
            n_cut = k if n_cut is None else min(n_cut, k)
    small_streak = 0
    k = 0
    converged = False
    limit = (n_cut + 1) if n_cut is not None else max_terms
    while k < limit:
        for b in (b1, b2):
            if _nonpositive_int(b + k) and (n_cut is None or k < n_cut):
                raise ParameterDegeneracyError(
                    f"3F2 lower parameter {b} hits a non-positive integer")
        ratio = ((a1 + k) * (a2 + k) * (a3 + k)
                 / ((b1 + k) * (b2 + k) * (k + 1.0)))
        term = term * ratio * x
        total = total + term
        k += 1
        if n_cut is None:
            scale = np.max(np.abs(total))
            if np.max(np.abs(term)) <= tol * max(scale, 1e-300):
                small_streak += 1
                if small_streak >= 2:
                    converged = True
                    break
            else:
                small_streak = 0
    if n_cut is not None:
        converged = True
    return total, k, converged


def hyp_3f2(a1, a2, a3, b1, b2, x, max_terms=_MAX_TERMS_3F2) -> SpecialFunctionResult:
    """3F2 at a single real argument; converged=False flags a truncated sum."""
    vals, k, conv = hyp3f2_array(a1, a2, a3, b1, b2, np.asarray([float(x)]),
                                 max_terms=max_terms)
    v = vals[0]
    return SpecialFunctionResult(complex(v) if np.iscomplexobj(vals) else float(v), k, conv)


# ---------------------------------------------------------------------------
# elliptic integrals and Jacobi functions (AGM / descending Landen)

_AGM_LEVELS = 12


def elliptic_K(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter m = k^2."""
    if not 0.0 <= m < 1.0:
        raise ValueError("m must lie in [0, 1)")
    a, b = 1.0, math.sqrt(1.0 - m)
    # AGM converges quadratically; |a - b| can stall a couple of ulps above
    # zero, so cap the iteration count rather than trusting the gap alone
    for _ in range(40):
        if abs(a - b) <= 2.3e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def jacobi_elliptic(x, m: float, n_levels: int = _AGM_LEVELS):
    """Jacobi sn, cn, dn at real x for parameter m = k^2 in [0, 1).

    Descending Landen recursion: run the AGM upward, set the amplitude at the
    deepest level, then fold back with phi_{n-1} = (phi_n + asin((c_n/a_n)
    sin phi_n)) / 2; finally sn = sin phi_0, cn = cos phi_0 and
    dn = sqrt(1 - m sn^2).
    """
    if not 0.0 <= m < 1.0:
        raise ValueError("m must lie in [0, 1)")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if m == 0.0:
        sn, cn, dn = np.sin(x), np.cos(x), np.ones_like(x)
    else:
        K = elliptic_K(m)
        # reduce into one full period to keep the folded phases moderate
        x_red = x - 4.0 * K * np.round(x / (4.0 * K))
        a_list = [1.0]
        b = math.sqrt(1.0 - m)
        c_list = [math.sqrt(m)]
        for _ in range(n_levels):
            a_next = 0.5 * (a_list[-1] + b)
            c_list.append(0.5 * (a_list[-1] - b))
            b = math.sqrt(a_list[-1] * b)
            a_list.append(a_next)
            if c_list[-1] < 1e-17:
                break
        depth = len(a_list) - 1
        phi = (2.0 ** depth) * a_list[depth] * x_red
        for i in range(depth, 0, -1):
            s = np.clip(c_list[i] / a_list[i] * np.sin(phi), -1.0, 1.0)
            phi = 0.5 * (phi + np.arcsin(s))
        sn = np.sin(phi)
        cn = np.cos(phi)
        # dn never vanishes for m < 1, so the identity form is stable where
        # the cos-ratio Landen expression degenerates to 0/0 (at cn = 0)
        dn = np.sqrt(np.maximum(1.0 - m * sn ** 2, 0.0))
    if scalar:
        return float(sn[0]), float(cn[0]), float(dn[0])
    return sn, cn, dn
