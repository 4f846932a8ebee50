"""General-field radiation pipeline.

Matrix elements are period averages of exp(i psi(t)) times a velocity
factor. The phase grows secularly as n omega0 t; evaluating it directly
costs precision at large harmonic number times Doppler factor, so every
average here is computed in bounded-phase form: the secular factor is an
exact root of unity (integer-mod twiddle) and only the order-one periodic
remainder goes through exp(). That keeps the extraction of exponentially
small harmonic amplitudes at full double accuracy.

Powers are reported in units of e0^2 omega0^2 / c, frequencies in units of
omega0, and the quantum strength is chi (see kinematics).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ExpansionInvalid, HarmonicBeyondValidity, RegimeWarning
from .fields import FieldModel, mean_square_field
from .kinematics import (
    Direction,
    Trajectory,
    direction_phase_parts,
    radiation_frequency,
    rho1_cumulative,
    rho2_cumulative,
)
from .specfun import pv_cot_double_integral


@dataclass(frozen=True)
class RadiationResult:
    """Total power with the first quantum correction.

    w_classical is the classical power, quantum_correction the signed
    relative first-order shift (so total power is
    w_classical * (1 + quantum_correction)), i_pi and i_sigma the
    polarization shares that sum to 1 + quantum_correction. delta0 and
    delta1 are the quadratic and cubic spectral sums in units of omega0^2
    and omega0^3; their ratio sets the expansion parameter.
    w_classical_field_route repeats the classical power through the
    mean-square-field identity, which holds in the small-deflection regime.
    """

    w_classical: float
    quantum_correction: float
    i_pi: float
    i_sigma: float
    delta0: float
    delta1: float
    validity_n_cr: float
    w_classical_field_route: float

    @property
    def w_total(self) -> float:
        return self.w_classical * (1.0 + self.quantum_correction)


def _twiddle(n: int, n_samples: int) -> np.ndarray:
    """exp(2 pi i n j / N) with the argument reduced exactly in integers."""
    idx = (n * np.arange(n_samples)) % n_samples
    return np.exp(2j * np.pi * idx / n_samples)


def _polarization_basis(direction: Direction):
    th, ph = direction.theta, direction.phi
    e_pi = np.array([np.cos(ph) * np.cos(th), np.sin(ph) * np.cos(th), -np.sin(th)])
    e_sg = np.array([np.sin(ph), -np.cos(ph), 0.0])
    return e_pi, e_sg


def _spin_summed_element(traj: Trajectory, direction: Direction, n: int, chi: float):
    """Core transition-current average with spin-linear terms dropped.

    Returns (B, w, w_cl): the complex 3-vector and the corrected and
    classical frequencies in units of omega0.
    """
    psi0 = direction.psi0
    w_cl = n / psi0
    w0 = traj.omega0
    f0_osc = direction_phase_parts(traj, direction)
    if chi == 0.0:
        phase = (w_cl * w0) * f0_osc
        weight = traj.beta.astype(complex)
        w = w_cl
    else:
        hbar = chi * traj.gamma / w0
        r1_rate, r1_per = rho1_cumulative(traj, direction)
        w = w_cl * (1.0 - hbar * (w_cl * w0) * r1_rate / (2.0 * traj.gamma * psi0))
        phase = (w * w0) * f0_osc + hbar * (w_cl * w0) ** 2 / (2.0 * traj.gamma) * r1_per
        e = direction.e_vec
        ebp = e[0] * traj.beta[:, 0] + e[1] * traj.beta[:, 1]
        b3 = traj.beta[:, 2]
        amp = 1.0 + hbar * (w_cl * w0) / (2.0 * traj.gamma * b3 ** 2) * (1.0 - ebp)
        weight = traj.beta * amp[:, None] + 0j
        b3dot = -(traj.beta[:, 0] * traj.beta_dot_perp[:, 0]
                  + traj.beta[:, 1] * traj.beta_dot_perp[:, 1]) / b3
        weight[:, 2] += 1j * hbar * b3dot / (2.0 * traj.gamma * b3 ** 2)
    core = np.exp(1j * phase)[:, None] * weight
    tw = _twiddle(n, traj.n_samples)
    b_vec = (tw[:, None] * core).mean(axis=0) / traj.beta_parallel
    return b_vec, w, w_cl


def matrix_element_no_flip(traj: Trajectory, direction: Direction, n: int,
                           spin: int, chi: float) -> np.ndarray:
    """Transition-current vector for harmonic n without spin flip.

    Includes the first-order quantum amplitude corrections and phase.
    spin=0 requests the spin-averaged element (spin-linear terms dropped),
    which is the object the closed helical forms describe. On a
    transverse-degenerate (planar) trajectory the spin-linear pieces have
    no finite form and are always omitted.
    """
    if spin not in (-1, 0, 1):
        raise ValueError("spin must be +1, -1 or 0 (spin-averaged)")
    if n < 1:
        raise ValueError("harmonic must be >= 1")
    b_sum, w, w_cl = _spin_summed_element(traj, direction, n, chi)
    if spin == 0 or chi == 0.0 or traj.is_transverse_degenerate:
        return b_sum

    w_res = radiation_frequency(traj, direction, n, spin, spin, chi)
    w0 = traj.omega0
    hbar = chi * traj.gamma / w0
    f0_osc = direction_phase_parts(traj, direction)
    _, r1_per = rho1_cumulative(traj, direction)
    _, r2_per = rho2_cumulative(traj, direction)
    phase = ((w_res * w0) * f0_osc
             + hbar * (w_cl * w0) ** 2 / (2.0 * traj.gamma) * r1_per
             + spin * hbar * (w_cl * w0) / 2.0 * r2_per)

    e = direction.e_vec
    b1, b2, b3 = traj.beta[:, 0], traj.beta[:, 1], traj.beta[:, 2]
    bd = traj.beta_dot_perp
    beta = traj.beta_total
    bp2 = b1 * b1 + b2 * b2
    ebp = e[0] * b1 + e[1] * b2
    amp = 1.0 + hbar * (w_cl * w0) / (2.0 * traj.gamma * b3 ** 2) * (1.0 - ebp)
    weight = traj.beta * amp[:, None] + 0j
    b3dot = -(b1 * bd[:, 0] + b2 * bd[:, 1]) / b3
    weight[:, 2] += 1j * hbar * b3dot / (2.0 * traj.gamma * b3 ** 2)

    spin_i = 1j * spin * hbar * (w_cl * w0) / (2.0 * traj.gamma)
    bracket = 1.0 / beta - beta * ebp / bp2
    weight[:, 0] += -spin_i * (b2 / b3) * bracket \
        + spin * hbar * beta / (2.0 * traj.gamma) * bd[:, 1] / b3 ** 3
    weight[:, 1] += -spin_i * (b1 / b3) * bracket \
        + spin * hbar * beta / (2.0 * traj.gamma) * bd[:, 0] / b3 ** 3
    weight[:, 2] += spin_i * beta * (e[0] * b2 - e[1] * b1) / bp2

    core = np.exp(1j * phase)[:, None] * weight
    tw = _twiddle(n, traj.n_samples)
    return (tw[:, None] * core).mean(axis=0) / traj.beta_parallel


def spectral_angular_power(traj: Trajectory, direction: Direction, n: int,
                           chi: float):
    """Spin-summed power of harmonic n per solid angle, split into the two
    linear polarizations (units e0^2 omega0^2 / c per steradian)."""
    if n < 1:
        raise ValueError("harmonic must be >= 1")
    b_vec, w, w_cl = _spin_summed_element(traj, direction, n, chi)
    e_pi, e_sg = _polarization_basis(direction)
    a_pi = b_vec @ e_pi
    a_sg = b_vec @ e_sg
    wgt = (traj.beta_parallel ** 2 / (2.0 * np.pi)) * w ** 4 / (w_cl ** 2 * direction.psi0)
    return wgt * abs(a_pi) ** 2, wgt * abs(a_sg) ** 2


def _velocity_harmonic_sq(traj: Trajectory, n: int) -> float:
    """Sum over transverse components of |(1/T) integral beta_k e^{i n w0 t} dt|^2."""
    if n >= traj.n_samples // 2:
        raise ValueError("harmonic beyond the trajectory's sample band")
    spec1 = np.fft.rfft(traj.beta[:, 0])[n]
    spec2 = np.fft.rfft(traj.beta[:, 1])[n]
    return (abs(spec1) ** 2 + abs(spec2) ** 2) / traj.n_samples ** 2


def critical_harmonic(traj: Trajectory, chi: float) -> float:
    """Harmonic number where the first-order correction stops being small."""
    if chi == 0.0:
        return np.inf
    bp2 = traj.beta_parallel ** 2
    return (1.0 - bp2) * bp2 / chi


def harmonic_power(traj: Trajectory, model: FieldModel, n: int, chi: float):
    """Angle-integrated power of harmonic n, (pi, sigma) split, in the
    small-deflection regime (units e0^2 omega0^2 / c)."""
    if n < 1:
        raise ValueError("harmonic must be >= 1")
    n_cr = critical_harmonic(traj, chi)
    if n >= n_cr:
        raise HarmonicBeyondValidity(
            f"harmonic {n} at or beyond the critical number {n_cr:.3g}")
    if traj.mu > 0.1:
        warnings.warn(
            f"deflection parameter {traj.mu:.3g} > 0.1; the per-harmonic "
            "angle integral is a small-deflection result", RegimeWarning,
            stacklevel=2)
    bp2 = traj.beta_parallel ** 2
    xi0 = chi / bp2
    csq = _velocity_harmonic_sq(traj, n)
    s_pi = (1.0 / 3.0) / (1.0 - bp2) ** 2 * (
        1.0 - (xi0 * n / 5.0) * (5.0 + 19.0 * bp2) / (1.0 - bp2))
    s_sg = 1.0 / (1.0 - bp2) ** 2 * (
        1.0 - xi0 * n * (1.0 + 3.0 * bp2) / (1.0 - bp2))
    return n * n * s_pi * csq, n * n * s_sg * csq


def total_power(traj: Trajectory, model: FieldModel, chi: float) -> RadiationResult:
    """Total radiated power with the first quantum correction.

    The classical power comes from the mean squared transverse
    acceleration; the quadratic and cubic spectral sums enter through the
    time-domain integral and the principal-value cotangent resummation.
    The mean-square-field route is evaluated as a cross-check and a
    RegimeWarning flags disagreement (it grows with gamma * deflection).
    """
    if chi < 0:
        raise ValueError("chi must be >= 0")
    w0 = traj.omega0
    bp2 = traj.beta_parallel ** 2
    d0_raw = float(np.mean(traj.beta_dot_perp[:, 0] ** 2
                           + traj.beta_dot_perp[:, 1] ** 2))
    d1_raw = 2.0 * pv_cot_double_integral(traj.beta_dot_perp,
                                          traj.beta_ddot_perp, traj.period_t)
    delta0 = d0_raw / w0 ** 2
    delta1 = d1_raw / w0 ** 3
    ratio = delta1 / delta0 if delta0 > 0.0 else 0.0

    if chi > 0.0 and delta0 > 0.0:
        expansion = chi * ratio / ((1.0 - bp2) * bp2)
        if expansion >= 0.5:
            raise ExpansionInvalid(
                f"quantum expansion parameter {expansion:.3g} >= 0.5")

    xi = (chi / bp2) * ratio
    i_pi = 0.25 - xi * (5.0 + 19.0 * bp2) / (20.0 * (1.0 - bp2))
    i_sg = 0.75 - xi * (3.0 + 9.0 * bp2) / (4.0 * (1.0 - bp2))

    w_cl = (2.0 / 3.0) * delta0 / (1.0 - bp2) ** 2
    w_cl_field = (2.0 / 3.0) * bp2 * mean_square_field(model) \
        / ((1.0 - bp2) * w0 ** 2)
    if w_cl > 0.0 and abs(w_cl_field / w_cl - 1.0) > 1e-6:
        warnings.warn(
            "classical power routes disagree by "
            f"{abs(w_cl_field / w_cl - 1.0):.2e}; outside the "
            "small-deflection identity's domain", RegimeWarning, stacklevel=2)

    return RadiationResult(
        w_classical=w_cl,
        quantum_correction=(i_pi + i_sg) - 1.0,
        i_pi=i_pi,
        i_sigma=i_sg,
        delta0=delta0,
        delta1=delta1,
        validity_n_cr=critical_harmonic(traj, chi),
        w_classical_field_route=w_cl_field,
    )
