"""Closed-form results for the helical undulator.

The drift-free orbit in the rotating field is a helix of radius
R = beta_perp / beta_parallel (unit field wavenumber), and every period
average of the radiation pipeline collapses to Bessel-function
combinations of the argument

    z = n beta_perp sin(theta) / (1 - beta_parallel cos(theta)).

Conventions: the matrix elements returned here are the (1/T) period
averages at phi = 0, whose classical limit is
(beta_perp (n/z) J_n, -i beta_perp J_n', beta_parallel J_n). The general
quadrature pipeline normalizes by an extra 1/beta_parallel and carries the
conjugate harmonic convention, so at phi = 0

    pipeline B(n) = conj(closed-form B(n)) / beta_parallel,

which is what the cross-validation tests assert. All first-order quantum
corrections are kept: the shifted principal Bessel argument, the
second-harmonic phase modulation, and the amplitude correction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RegimeWarning
from .specfun import bessel_j, oscillatory_moment

SQRT3 = math.sqrt(3.0)
ULTRA_TOTAL_COEFF = 55.0 * SQRT3 / 16.0
ULTRA_PI_COEFF = 5.0 * SQRT3 / 16.0
ULTRA_SIGMA_COEFF = 50.0 * SQRT3 / 16.0


@dataclass(frozen=True)
class HelixParams:
    """Drift-free helical orbit parameters.

    beta_perp and beta_parallel are the transverse and drift speeds, chi
    the quantum strength. gamma and the helix radius are derived and kept
    consistent to 1e-12.
    """

    beta_perp: float
    beta_parallel: float
    gamma: float
    radius: float
    chi: float = 0.0

    def __post_init__(self):
        b2 = self.beta_perp ** 2 + self.beta_parallel ** 2
        if not 0.0 < b2 < 1.0:
            raise ValueError("need 0 < beta_perp^2 + beta_parallel^2 < 1")
        if self.beta_perp < 0.0:
            raise ValueError("beta_perp must be >= 0")
        if abs(self.gamma * math.sqrt(1.0 - b2) - 1.0) > 1e-12:
            raise ValueError("gamma inconsistent with the speeds")
        if abs(self.radius * self.beta_parallel - self.beta_perp) > 1e-12:
            raise ValueError("radius inconsistent with the speeds")

    @classmethod
    def from_speeds(cls, beta_perp: float, beta_parallel: float,
                    chi: float = 0.0) -> "HelixParams":
        b2 = beta_perp ** 2 + beta_parallel ** 2
        return cls(beta_perp=float(beta_perp), beta_parallel=float(beta_parallel),
                   gamma=1.0 / math.sqrt(1.0 - b2),
                   radius=beta_perp / beta_parallel, chi=float(chi))

    @property
    def beta_total(self) -> float:
        return math.sqrt(self.beta_perp ** 2 + self.beta_parallel ** 2)

    def bessel_argument(self, n: int, theta: float) -> float:
        psi0 = 1.0 - self.beta_parallel * math.cos(theta)
        return n * self.beta_perp * math.sin(theta) / psi0


def helical_matrix_elements(p: HelixParams, n: int, theta: float) -> np.ndarray:
    """Quantum-corrected transition currents of harmonic n on the helix.

    Evaluated in the shift basis of the oscillatory moments, so small
    Bessel arguments cost no cancellation. Exact classical limit at
    chi = 0.
    """
    if n < 1:
        raise ValueError("harmonic must be >= 1")
    if not 0.0 < theta < np.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    bpar = p.beta_parallel
    psi0 = 1.0 - bpar * math.cos(theta)
    z = p.bessel_argument(n, theta)
    if p.chi == 0.0:
        c0, c1bs, q2, z1 = 1.0, 0.0, 0.0, z
    else:
        h = p.chi * n / (psi0 * bpar ** 2)
        c0 = 1.0 + 0.5 * h
        c1bs = 0.5 * h * p.beta_perp * math.sin(theta)
        q2 = p.chi * z * z / (8.0 * bpar ** 2)
        z1 = z * (1.0 + (p.chi * n / (2.0 * bpar ** 2))
                  * (1.0 - z * z / (2.0 * n * n)))

    b1 = c0 * oscillatory_moment(n, z1, "cos") \
        - c1bs * oscillatory_moment(n, z, "cos2") \
        + 1j * q2 * oscillatory_moment(n, z, "sin_2eta_cos")
    b2 = c0 * oscillatory_moment(n, z1, "sin") \
        - c1bs * oscillatory_moment(n, z, "sin_cos") \
        + 1j * q2 * oscillatory_moment(n, z, "sin_2eta_sin")
    b3 = c0 * oscillatory_moment(n, z1, "1") \
        - c1bs * oscillatory_moment(n, z, "cos") \
        + 1j * q2 * oscillatory_moment(n, z, "sin_2eta")
    return np.array([p.beta_perp * np.conj(b1),
                     p.beta_perp * np.conj(b2),
                     bpar * np.conj(b3)])


@dataclass(frozen=True)
class AngularIntensity:
    """Per-harmonic polarization intensities; negative_intensity marks a
    first-order value pushed below zero (chi outside its validity there)."""

    pi_intensity: float
    sigma_intensity: float
    negative_intensity: bool


def helical_spectral_angular(p: HelixParams, n: int, theta: float) -> AngularIntensity:
    """First-order quantum-corrected helical intensities for both linear
    polarizations (chi = 0 gives the classical helical distribution)."""
    if n < 1:
        raise ValueError("harmonic must be >= 1")
    if not 0.0 < theta < np.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    bpar = p.beta_parallel
    ct, st = math.cos(theta), math.sin(theta)
    psi0 = 1.0 - bpar * ct
    z = p.bessel_argument(n, theta)
    ev = bessel_j(n, z)
    jn, jd, jdd = ev.value, ev.d1, ev.d2
    q = p.chi * n / bpar ** 2
    api = ((ct - bpar) / st) ** 2 * (
        jn * jn - q * (jn * jn * (1.5 * (1.0 + bpar * ct) / psi0 + z * z / n ** 2)
                       - 0.5 * z * (1.0 - z * z / n ** 2) * jd * jn))
    asg = p.beta_perp ** 2 * (
        jd * jd - q * (jd * jd * ((1.0 + 2.0 * bpar * ct) / psi0 + z * z / n ** 2)
                       - 0.5 * z * (1.0 - z * z / n ** 2) * jd * jdd))
    return AngularIntensity(api, asg, api < 0.0 or asg < 0.0)


def helical_angular_power(p: HelixParams, n: int, theta: float):
    """Intensities dressed with the harmonic weight: power per solid angle
    in units e0^2 omega0^2 / c, (pi, sigma)."""
    cell = helical_spectral_angular(p, n, theta)
    psi0 = 1.0 - p.beta_parallel * math.cos(theta)
    wgt = n * n / (2.0 * np.pi * psi0 ** 3)
    return wgt * cell.pi_intensity, wgt * cell.sigma_intensity


def boson_spectral_angular(p: HelixParams, n: int, theta: float) -> AngularIntensity:
    """Same observable assembled the other way: quantum-corrected matrix
    elements plus the frequency-weight factor, rather than the expanded
    first-order brackets. Agrees with helical_spectral_angular to first
    order in chi; the difference is a consistency probe of the closed-form
    algebra."""
    if n < 1:
        raise ValueError("harmonic must be >= 1")
    bpar = p.beta_parallel
    ct, st = math.cos(theta), math.sin(theta)
    psi0 = 1.0 - bpar * ct
    b = helical_matrix_elements(p, n, theta)
    a_pi = b[0] * ct - b[2] * st
    a_sg = b[1]
    # frequency ratio omega/omega_cl for the quartic spectral weight
    r1 = (1.0 - bpar ** 2 * ct ** 2 + p.beta_perp ** 2 * st ** 2 / 2.0) / bpar ** 2
    wr = 1.0 - (p.chi * n / (2.0 * psi0)) * r1 / psi0
    w4 = wr ** 4
    return AngularIntensity(w4 * abs(a_pi) ** 2, w4 * abs(a_sg) ** 2, False)


def helical_total_power_ultra(p: HelixParams, compton_over_radius: float):
    """Ultrarelativistic total power ratio and its polarization split.

    compton_over_radius is the electron Compton wavelength over the helix
    radius. Returns (w_over_wcl, f_pi, f_sigma) with
    f_pi + f_sigma = w_over_wcl identically.
    """
    if p.gamma < 10.0:
        warnings.warn(
            f"gamma = {p.gamma:.3g} < 10; the ultrarelativistic closed form "
            "is an asymptotic result", RegimeWarning, stacklevel=2)
    s = compton_over_radius * p.gamma ** 2 * (1.0 - p.beta_parallel ** 2)
    f_pi = 0.125 - ULTRA_PI_COEFF * s
    f_sg = 0.875 - ULTRA_SIGMA_COEFF * s
    return 1.0 - ULTRA_TOTAL_COEFF * s, f_pi, f_sg
