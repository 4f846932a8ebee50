"""Special functions and quadrature kernels.

Bessel J_n with two derivatives (ascending series / Miller downward
recurrence), the nine oscillatory moments

    M_w(n, xi) = (1/2pi) integral_0^{2pi} exp(i(n eta - xi sin eta)) w(eta) d eta

in closed Bessel form, and the principal-value cotangent double integral
that resums the cubic harmonic series of the radiated power.

The moments are evaluated in the recurrence ("shift") basis J_{n-3}..J_{n+3},
which is algebraically identical to the familiar (J, J', J'') expressions
but free of 1/xi powers, so it is exact at xi = 0 and loses nothing to
cancellation at small argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, OrderOverflow

MAX_ORDER = 200
MAX_ARGUMENT = 1.0e4

MOMENT_WEIGHTS = (
    "1", "sin", "cos", "sin2", "cos2",
    "sin_2eta", "sin_cos", "sin_2eta_sin", "sin_2eta_cos",
)


@dataclass(frozen=True)
class BesselEval:
    order: int
    argument: float
    value: float
    d1: float
    d2: float


def _series_jn(n: int, x: float) -> float:
    """Ascending power series for J_n(x), n >= 0, summed to machine precision."""
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    half = 0.5 * x
    # leading (x/2)^n / n! in log space to dodge overflow at large n
    term = math.exp(n * math.log(abs(half)) - math.lgamma(n + 1))
    if half < 0 and n % 2:
        term = -term
    total = term
    q = -half * half
    k = 1
    while True:
        term *= q / (k * (n + k))
        total += term
        if abs(term) <= 1e-18 * abs(total) + 5e-324:
            return total
        k += 1
        if k > 400:  # unreachable for the accepted domain
            return total


def _miller_array(n_top: int, x: float) -> np.ndarray:
    """J_0..J_{n_top}(x) by downward recurrence with sum normalization."""
    start = int(max(n_top, x) + 16 + 12 * max(n_top, x) ** 0.5)
    start += start % 2
    jp1 = 0.0
    jc = 1e-300
    out = np.zeros(n_top + 1)
    norm = 0.0
    for k in range(start, -1, -1):
        jm1 = (2.0 * (k + 1) / x) * jc - jp1
        jp1, jc = jc, jm1
        # jc now holds J_k estimate (unnormalized)
        if k <= n_top:
            out[k] = jc
        if k > 0 and k % 2 == 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:  # rescale to avoid overflow
            jp1 *= 1e-250
            jc *= 1e-250
            out *= 1e-250
            norm *= 1e-250
    norm += jc  # adds J_0
    return out / norm


def _jn_table(n_lo: int, n_hi: int, x: float) -> dict:
    """Consistent J_k(x) for k in [n_lo, n_hi], x >= 0.

    The ascending series is used where its terms never grow (no
    cancellation): small x outright, or order dominating the argument.
    Everything else goes through Miller downward recurrence, whose start
    index sits safely above both the order and the argument. The naive
    "series whenever x < 2n" rule loses most digits around x ~ n >~ 25 and
    is deliberately not used.
    """
    table = {}
    if n_lo <= 0 <= n_hi:
        k_min = 0
    else:
        k_min = min(abs(n_lo), abs(n_hi))
    series_safe = x < 12.0 or x * x < 3.2 * (k_min + 1)
    if series_safe:
        for k in range(n_lo, n_hi + 1):
            a = _series_jn(abs(k), x)
            table[k] = a if (k >= 0 or k % 2 == 0) else -a
    else:
        pos_hi = max(n_hi, 0, -n_lo)
        arr = _miller_array(pos_hi, x)
        for k in range(n_lo, n_hi + 1):
            a = arr[abs(k)]
            table[k] = a if (k >= 0 or k % 2 == 0) else -a
    return table


def bessel_j(n: int, x: float) -> BesselEval:
    """J_n(x) together with its first two derivatives.

    Derivatives come from the neighbor orders computed by the same method,
    d1 = (J_{n-1} - J_{n+1})/2 and d2 = (J_{n-2} - 2 J_n + J_{n+2})/4, so
    the triple satisfies the Bessel equation to roundoff.
    """
    n = int(n)
    x = float(x)
    if abs(n) > MAX_ORDER or abs(x) > MAX_ARGUMENT:
        raise OrderOverflow(f"bessel_j outside supported range: n={n}, x={x}")
    # reduce to n >= 0, x >= 0
    sign_n = -1.0 if (n < 0 and n % 2) else 1.0
    m = abs(n)
    sign_x = -1.0 if (x < 0 and m % 2) else 1.0
    ax = abs(x)
    t = _jn_table(m - 2, m + 2, ax)
    val = t[m]
    d1 = 0.5 * (t[m - 1] - t[m + 1])
    d2 = 0.25 * (t[m - 2] - 2.0 * t[m] + t[m + 2])
    s = sign_n * sign_x
    dsign = 1.0 if x >= 0 else -1.0  # chain rule for the x < 0 reflection
    return BesselEval(n, x, s * val, sign_n * dsign * sign_x * d1, s * d2)


def oscillatory_moment(n: int, xi: float, weight: str) -> complex:
    """Closed form of M_w(n, xi) for the nine supported weights.

    Shift-basis combinations of J_{n-3}..J_{n+3}; no quadrature involved.
    """
    if xi < 0:
        raise ValueError("xi must be >= 0")
    if weight not in MOMENT_WEIGHTS:
        raise ValueError(f"unknown weight {weight!r}")
    if abs(n) + 3 > MAX_ORDER:
        raise OrderOverflow(f"moment order out of range: n={n}")
    t = _jn_table(n - 3, n + 3, xi)
    if weight == "1":
        return complex(t[n])
    if weight == "sin":
        return 0.5j * (t[n - 1] - t[n + 1])
    if weight == "cos":
        return complex(0.5 * (t[n - 1] + t[n + 1]))
    if weight == "sin2":
        return complex(0.25 * (2.0 * t[n] - t[n + 2] - t[n - 2]))
    if weight == "cos2":
        return complex(0.25 * (2.0 * t[n] + t[n + 2] + t[n - 2]))
    if weight == "sin_2eta":
        return -0.5j * (t[n + 2] - t[n - 2])
    if weight == "sin_cos":
        return -0.25j * (t[n + 2] - t[n - 2])
    if weight == "sin_2eta_sin":
        return complex(0.25 * (t[n + 1] + t[n - 1] - t[n + 3] - t[n - 3]))
    # sin_2eta_cos
    return -0.25j * (t[n + 3] - t[n - 3] + t[n + 1] - t[n - 1])


def _half_step_shift(samples: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of periodic samples onto the grid offset
    by half a step. The Nyquist bin is dropped; callers keep their band
    under N/2."""
    n = samples.shape[0]
    spec = np.fft.rfft(samples, axis=0)
    k = np.arange(spec.shape[0])
    spec = spec * np.exp(1j * np.pi * k / n)[:, None]
    if n % 2 == 0:
        spec[-1] = 0.0
    return np.fft.irfft(spec, n, axis=0)


def pv_cot_double_integral(dbeta: np.ndarray, ddbeta: np.ndarray, period: float) -> float:
    """Principal value of (1/2T^2) times the double period integral of
    (f(t), g(tau)) cot(pi (t - tau)/T), for the transverse velocity
    derivative pair f = beta_perp', g = beta_perp''.

    Both inputs are (N, 2) samples on the same uniform grid, N even. The
    tau factor is resampled onto the grid shifted by half a step, so every
    evaluated difference t - tau sits strictly between kernel poles and the
    symmetric pairing realizes the principal value. Exact for band-limited
    inputs with band < N/2.
    """
    dbeta = np.asarray(dbeta, dtype=float)
    ddbeta = np.asarray(ddbeta, dtype=float)
    if dbeta.shape != ddbeta.shape:
        raise GridMismatch(
            f"sample shapes differ: {dbeta.shape} vs {ddbeta.shape}")
    if dbeta.ndim != 2 or dbeta.shape[1] != 2:
        raise GridMismatch("expected (N, 2) transverse samples")
    n = dbeta.shape[0]
    if n % 2:
        raise GridMismatch("need an even number of samples")
    g = _half_step_shift(ddbeta)
    # kernel over the cyclic difference d = j - k, evaluated at (d - 1/2)h
    d = np.arange(n)
    kern = 1.0 / np.tan(np.pi * (d - 0.5) / n)
    # S_j = sum_k kern[(j-k) mod N] g_k, a circular convolution
    kern_f = np.fft.rfft(kern)
    total = 0.0
    for comp in range(2):
        conv = np.fft.irfft(kern_f * np.fft.rfft(g[:, comp]), n)
        total += float(np.dot(dbeta[:, comp], conv))
    return total / (2.0 * n * n)
