"""Radiative spin flip and self-polarization in the helical undulator.

Flip transitions happen at the shifted harmonics
omega = omega0 (n - zeta beta/beta_parallel) / psi0; only channels with a
positive frequency radiate, which is what makes the two initial spin
orientations decay at different rates. The asymmetry function

    Gamma(beta) = 5 (1 - beta^2) / (5 - 2 beta^2 + 3 beta^4)

fixes both rates, the relaxation time and the equilibrium polarization
(flips into the along-motion state dominate).

Amplitude conventions follow the closed forms used throughout the
literature trail of this calculation: the returned flip amplitudes are
beta_parallel times the polarization projections of the flip
transition-current vector, so the rate integral reads

    w / omega0 = alpha_fs * integral (sin(theta)/psi0)
                 sum_n (omega/omega0) (|a_pi|^2 + |a_sigma|^2) d(theta).

Note the projection labels: a_pi here multiplies the sigma basis vector of
the no-flip pipeline and vice versa. The labels are kept for continuity
with the closed-form literature; only the sum enters any observable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    NoKinematicSupport,
    PolarizationRegimeViolation,
    RegimeWarning,
)
from .helical import HelixParams
from .kinematics import (
    Direction,
    Trajectory,
    classical_frequency,
    direction_phase_parts,
    rho3_cumulative,
)
from .specfun import bessel_j
from .spectra import _twiddle

ALPHA_FS = 1.0 / 137.035999


@dataclass(frozen=True)
class SpinResult:
    """Flip rates (units omega0), asymmetry, relaxation time (units
    1/omega0) and equilibrium polarization, with their ultrarelativistic
    asymptotic forms for comparison."""

    w_down_up: float
    w_up_down: float
    gamma_factor: float
    tau_omega0: float
    p_equilibrium: float
    tau_omega0_ultra: float
    p_equilibrium_ultra: float


def spin_asymmetry(beta: float) -> float:
    """Gamma(beta): 1 at rest, 0 at the light speed limit, monotone."""
    b2 = beta * beta
    return 5.0 * (1.0 - b2) / (5.0 - 2.0 * b2 + 3.0 * b2 * b2)


def flip_matrix_element(traj: Trajectory, direction: Direction, n: int,
                        spin: int, chi: float) -> np.ndarray:
    """Transition-current vector of the spin-flip channel at harmonic n,
    by bounded-phase period quadrature. Requires transverse motion with no
    zeros; the amplitude is first order in chi by construction."""
    if spin not in (-1, 1):
        raise ValueError("spin must be +1 or -1")
    if chi <= 0.0:
        raise ValueError("flip amplitudes need chi > 0")
    w_hat = classical_frequency(traj, direction, n, spin, -spin)
    if w_hat <= 0.0:
        raise NoKinematicSupport(
            f"flip channel n={n}, spin {spin}: no positive frequency")
    _, r3_per = rho3_cumulative(traj)
    f0_osc = direction_phase_parts(traj, direction)
    w_raw = w_hat * traj.omega0
    phase = w_raw * f0_osc + spin * r3_per

    beta = traj.beta_total
    b1, b2, b3 = traj.beta[:, 0], traj.beta[:, 1], traj.beta[:, 2]
    bperp = np.sqrt(b1 * b1 + b2 * b2)
    v = np.stack([(1j * beta * b2 - spin * b3 * b1) / bperp,
                  (-1j * beta * b1 - spin * b3 * b2) / bperp,
                  spin * bperp + 0j], axis=1)
    pref = chi * w_hat / (2.0 * traj.gamma * beta ** 2)
    core = np.exp(1j * phase)[:, None] * v
    tw = _twiddle(n, traj.n_samples)
    return pref * (tw[:, None] * core).mean(axis=0) / traj.beta_parallel


def flip_amplitudes_helical(p: HelixParams, n: int, theta: float, spin: int):
    """Closed-form flip amplitudes (a_pi, a_sigma) on the helix.

    Valid for any integer n; raises NoKinematicSupport when the channel
    frequency is not positive. The Bessel brackets are evaluated through
    neighbor orders, which keeps the near-axis cancellations exact:

        a_pi bracket = ((beta + s bpar) J_{n-1} + (beta - s bpar) J_{n+1})/2.
    """
    if spin not in (-1, 1):
        raise ValueError("spin must be +1 or -1")
    if not 0.0 < theta < np.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    if p.chi <= 0.0:
        raise ValueError("flip amplitudes need chi > 0")
    bpar = p.beta_parallel
    beta = p.beta_total
    psi0 = 1.0 - bpar * math.cos(theta)
    nu = n - spin * beta / bpar
    if nu <= 0.0:
        raise NoKinematicSupport(
            f"flip channel n={n}, spin {spin}: no positive frequency")
    w_hat = nu / psi0
    z = (p.beta_perp * math.sin(theta) / psi0) * nu
    jm = bessel_j(n - 1, z).value
    jp = bessel_j(n + 1, z).value
    jn = bessel_j(n, z).value
    brace_pi = 0.5 * ((beta + spin * bpar) * jm + (beta - spin * bpar) * jp)
    brace_sg = 0.5 * ((beta + spin * bpar) * jm - (beta - spin * bpar) * jp)
    pref = p.chi * w_hat / (2.0 * p.gamma * beta ** 2)
    a_pi = 1j * pref * brace_pi
    a_sg = -pref * (brace_sg * math.cos(theta)
                    + spin * p.beta_perp * jn * math.sin(theta))
    return a_pi, a_sg


def _check_polarization_regime(p: HelixParams):
    crit = p.beta_perp / (p.beta_total * math.sqrt(1.0 - p.beta_total ** 2))
    if crit > 0.5:
        raise PolarizationRegimeViolation(
            f"deflection measure {crit:.3g} > 0.5; the closed-form rates "
            "assume small deflection")
    if crit > 0.1:
        warnings.warn(
            f"deflection measure {crit:.3g} > 0.1; closed-form flip rates "
            "lose accuracy", RegimeWarning, stacklevel=3)


def flip_probability(p: HelixParams, spin: int, alpha_fs: float = ALPHA_FS) -> float:
    """Closed-form flip rate from initial spin state, in units of omega0."""
    if spin not in (-1, 1):
        raise ValueError("spin must be +1 or -1")
    _check_polarization_regime(p)
    b2 = p.beta_total ** 2
    shape = (5.0 - 2.0 * b2 + 3.0 * b2 * b2) / (1.0 - b2) ** 3
    return alpha_fs * p.chi ** 2 * (p.beta_perp ** 2 / (30.0 * b2 * b2)) * shape \
        * (1.0 - spin * spin_asymmetry(p.beta_total))


def flip_probability_summed(p: HelixParams, spin: int,
                            alpha_fs: float = ALPHA_FS,
                            n_theta: int = 1024, n_max: int = 40) -> float:
    """Flip rate assembled the long way: harmonic and angular sum of the
    closed-form amplitudes. Converges to flip_probability in the
    small-deflection regime; used as its independent check."""
    th = np.pi * (np.arange(n_theta) + 0.5) / n_theta
    dth = np.pi / n_theta
    total = 0.0
    n_lo = math.floor(spin * p.beta_total / p.beta_parallel) + 1
    quiet = 0
    for n in range(n_lo, n_lo + n_max):
        contrib = 0.0
        for t in th:
            try:
                a_pi, a_sg = flip_amplitudes_helical(p, n, t, spin)
            except NoKinematicSupport:
                continue
            psi0 = 1.0 - p.beta_parallel * math.cos(t)
            w_hat = (n - spin * p.beta_total / p.beta_parallel) / psi0
            contrib += math.sin(t) / psi0 * w_hat * (abs(a_pi) ** 2 + abs(a_sg) ** 2)
        contrib *= dth
        total += contrib
        quiet = quiet + 1 if contrib < 1e-12 * max(total, 1e-300) else 0
        if quiet >= 3:
            break
    return alpha_fs * total


def polarization_characteristics(p: HelixParams,
                                 alpha_fs: float = ALPHA_FS) -> SpinResult:
    """Rates, relaxation time and equilibrium polarization of a bunch."""
    w_du = flip_probability(p, -1, alpha_fs)
    w_ud = flip_probability(p, +1, alpha_fs)
    gam = spin_asymmetry(p.beta_total)
    b2 = p.beta_total ** 2
    tau = 1.0 / (w_du + w_ud)
    tau_ultra = 2.5 * (1.0 - b2) ** 2 \
        / (alpha_fs * p.chi ** 2 * p.gamma ** 2 * p.beta_perp ** 2)
    return SpinResult(
        w_down_up=w_du,
        w_up_down=w_ud,
        gamma_factor=gam,
        tau_omega0=tau,
        p_equilibrium=gam,
        tau_omega0_ultra=tau_ultra,
        p_equilibrium_ultra=(5.0 / 6.0) * (1.0 - b2),
    )
