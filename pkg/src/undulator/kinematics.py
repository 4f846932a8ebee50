"""Periodic electron trajectories and the frequency bookkeeping built on them.

A trajectory is constructed in three steps. First the transverse canonical
momenta (p1, p2) are solved so the period-averaged transverse drift
vanishes (damped Newton, analytic Jacobian, tolerance 1e-13 on the averaged
drift fraction). Second the longitudinal motion is reparameterized from z
to lab time through dt = gamma dz / p(z), using the Fourier antiderivative
of gamma/p so the map keeps spectral accuracy, and inverted by Newton onto
a uniform time grid. Third the velocity, its analytic time derivatives and
the periodic parts of the position are sampled on that grid.

All spectral quadrature downstream is the plain sample mean over the
uniform grid, which is exponentially accurate for the smooth periodic
integrands produced here.

Frequencies are reported in units of the motion frequency omega0 = 2 pi / T
and the single quantum input is chi = (photon quantum of the motion
frequency) / (electron energy), so hbar never appears explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTransverseMotion,
    NoKinematicSupport,
    NonConvergence,
    QuantumParameterTooLarge,
    UndulatorRegimeViolation,
)
from .fields import PERIOD_L, FieldModel

_DRIFT_TOL = 1e-13
_TRANSVERSE_FLOOR = 1e-8  # fraction of the peak transverse speed squared


@dataclass(frozen=True)
class Trajectory:
    """One period of drift-free periodic motion, immutable once built.

    Arrays are sampled on the uniform time grid t_j = j T / N. ``pos``
    holds the periodic parts only: x, y (zero mean) and z - beta_parallel t.
    ``beta_dot_perp`` and ``beta_ddot_perp`` are analytic derivatives
    obtained from the field along the orbit, not finite differences.
    """

    beta: np.ndarray
    pos: np.ndarray
    beta_dot_perp: np.ndarray
    beta_ddot_perp: np.ndarray
    period_t: float
    beta_parallel: float
    beta_total: float
    gamma: float
    mu: float
    p_perp: tuple
    model: FieldModel

    @property
    def n_samples(self) -> int:
        return self.beta.shape[0]

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi / self.period_t

    @property
    def times(self) -> np.ndarray:
        return self.period_t * np.arange(self.n_samples) / self.n_samples

    @property
    def transverse_speed_sq(self) -> np.ndarray:
        return self.beta[:, 0] ** 2 + self.beta[:, 1] ** 2

    @property
    def is_transverse_degenerate(self) -> bool:
        b2 = self.transverse_speed_sq
        top = float(np.max(b2))
        return top == 0.0 or float(np.min(b2)) <= _TRANSVERSE_FLOOR * top


@dataclass(frozen=True)
class Direction:
    """Photon emission direction relative to the undulator axis."""

    theta: float
    phi: float
    beta_parallel: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0.0 < self.psi0 < 2.0:
            raise ValueError("Doppler factor out of range; check beta_parallel")

    @classmethod
    def toward(cls, traj: Trajectory, theta: float, phi: float = 0.0) -> "Direction":
        return cls(float(theta), float(phi), traj.beta_parallel)

    @property
    def e_vec(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi),
                         math.cos(self.theta)])

    @property
    def psi0(self) -> float:
        return 1.0 - self.beta_parallel * math.cos(self.theta)


def cumulative_periodic(samples: np.ndarray, period: float):
    """Split the running integral of uniform periodic samples into
    (mean rate, periodic part starting at zero).

    integral_0^t f = rate * t + per(t), per(0) = 0, via the Fourier
    antiderivative; spectrally accurate for smooth f.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    rate = float(np.mean(samples))
    spec = np.fft.rfft(samples - rate)
    k = np.arange(spec.shape[0])
    w = 2.0 * np.pi * k / period
    out = np.zeros_like(spec)
    out[1:] = spec[1:] / (1j * w[1:])
    if n % 2 == 0:
        out[-1] = 0.0
    per = np.fft.irfft(out, n)
    return rate, per - per[0]


def solve_trajectory(model: FieldModel, gamma: float, n_samples: int = 512) -> Trajectory:
    """Construct the drift-free periodic trajectory of an electron with
    Lorentz factor gamma in the given field.

    Raises UndulatorRegimeViolation when the field is too strong for the
    energy (the longitudinal momentum would hit zero, so no through-going
    periodic orbit exists) and NonConvergence if the drift solve stalls.
    The drift solve starts from zero transverse canonical momentum, which
    covers every zero-mean vector potential of interest here.
    """
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    if n_samples < 64 or (n_samples & (n_samples - 1)) != 0:
        raise ValueError("n_samples must be a power of two >= 64")

    lam_sq = gamma * gamma - 1.0
    zg = PERIOD_L * np.arange(n_samples) / n_samples
    a1, a2 = model.vector_potential(zg)

    def momentum_sq(p1: float, p2: float):
        return lam_sq - (p1 + a1) ** 2 - (p2 + a2) ** 2

    p1 = p2 = 0.0
    psq = momentum_sq(p1, p2)
    if np.min(psq) <= 1e-14 * lam_sq:
        raise UndulatorRegimeViolation(
            "longitudinal momentum vanishes on the period; field too strong "
            f"for gamma={gamma}")

    # damped Newton for the two averaged-drift conditions
    for _ in range(60):
        p = np.sqrt(psq)
        cp1, cp2 = p1 + a1, p2 + a2
        g = np.array([np.mean(cp1 / p), np.mean(cp2 / p)])
        scale = float(np.mean(lam_sq ** 0.5 / p))
        if np.max(np.abs(g)) <= _DRIFT_TOL * scale:
            break
        jac = np.array([
            [np.mean(1.0 / p + cp1 * cp1 / p ** 3), np.mean(cp1 * cp2 / p ** 3)],
            [np.mean(cp1 * cp2 / p ** 3), np.mean(1.0 / p + cp2 * cp2 / p ** 3)],
        ])
        try:
            step = np.linalg.solve(jac, g)
        except np.linalg.LinAlgError as exc:
            raise NonConvergence("singular Jacobian in drift solve") from exc
        damp = 1.0
        for _ in range(60):
            trial = momentum_sq(p1 - damp * step[0], p2 - damp * step[1])
            if np.min(trial) > 1e-14 * lam_sq:
                break
            damp *= 0.5
        else:
            raise UndulatorRegimeViolation(
                "no through-going orbit reachable by the drift solve")
        p1 -= damp * step[0]
        p2 -= damp * step[1]
        psq = momentum_sq(p1, p2)
    else:
        raise NonConvergence("drift conditions not met after 60 iterations")

    p = np.sqrt(psq)

    # reparameterize z -> t; u = gamma/p is dt/dz
    u = gamma / p
    u_rate, u_per_spec = np.mean(u), np.fft.rfft(u - np.mean(u))
    period_t = float(u_rate) * PERIOD_L
    beta_par = PERIOD_L / period_t
    k = np.arange(u_per_spec.shape[0])
    anti = np.zeros_like(u_per_spec)
    anti[1:] = u_per_spec[1:] / (1j * k[1:]) / n_samples
    if n_samples % 2 == 0:
        anti[-1] = 0.0

    per0 = 2.0 * np.real(np.sum(anti[1:]))

    def t_periodic(z):
        """Periodic part of t(z) - mean rate * z, anchored at z = 0."""
        m = np.exp(1j * np.multiply.outer(z, k[1:]))
        return 2.0 * np.real(m @ anti[1:]) - per0

    tk = period_t * np.arange(n_samples) / n_samples
    zk = tk / u_rate
    converged = False
    for _ in range(50):
        a1k, a2k = model.vector_potential(zk)
        pk = np.sqrt(np.maximum(lam_sq - (p1 + a1k) ** 2 - (p2 + a2k) ** 2, 1e-300))
        resid = u_rate * zk + t_periodic(zk) - tk
        zk = zk - resid * pk / gamma
        if converged:
            break
        converged = np.max(np.abs(resid)) <= 1e-13 * period_t
    else:
        raise NonConvergence("time reparameterization did not converge")
    # The phase integrals need z - beta_parallel t to absolute accuracy far
    # below eps * T, which the subtraction cannot give. The inversion
    # identity provides it directly: z - beta_parallel t = -beta_parallel
    # times the periodic part of t(z).
    z_per = -beta_par * t_periodic(zk)

    a1k, a2k = model.vector_potential(zk)
    cp1, cp2 = p1 + a1k, p2 + a2k
    pk = np.sqrt(lam_sq - cp1 ** 2 - cp2 ** 2)
    beta = np.stack([cp1, cp2, pk], axis=1) / gamma

    h1, h2 = model.magnetic_field(zk)
    dh1, dh2 = model.magnetic_field_derivative(zk)
    b3 = beta[:, 2]
    bd1 = h2 * b3 / gamma
    bd2 = -h1 * b3 / gamma
    b3dot = -(beta[:, 0] * bd1 + beta[:, 1] * bd2) / b3
    bdd1 = (dh2 * b3 ** 2 + h2 * b3dot) / gamma
    bdd2 = (-dh1 * b3 ** 2 - h1 * b3dot) / gamma

    _, x = cumulative_periodic(beta[:, 0], period_t)
    _, y = cumulative_periodic(beta[:, 1], period_t)
    pos = np.stack([x - np.mean(x), y - np.mean(y), z_per], axis=1)

    mu = float(np.max(np.abs(beta[:, :2]) / beta[:, 2:3]))
    return Trajectory(
        beta=beta,
        pos=pos,
        beta_dot_perp=np.stack([bd1, bd2], axis=1),
        beta_ddot_perp=np.stack([bdd1, bdd2], axis=1),
        period_t=period_t,
        beta_parallel=beta_par,
        beta_total=math.sqrt(lam_sq) / gamma,
        gamma=float(gamma),
        mu=mu,
        p_perp=(float(p1), float(p2)),
        model=model,
    )


def deflection_parameter(traj: Trajectory) -> float:
    """Largest velocity deflection angle max(|beta_1/beta_3|, |beta_2/beta_3|)."""
    return float(np.max(np.abs(traj.beta[:, :2]) / traj.beta[:, 2:3]))


@dataclass(frozen=True)
class RhoValues:
    """Period totals of the four phase functionals.

    rho0 is the z-averaged form (equals 1/beta_parallel for drift-free
    motion). rho1 and rho3 are the time-domain running integrals evaluated
    at one period; rho2 is the z-domain period average. Each is in the
    normalization consumed directly by radiation_frequency.
    """

    rho0: float
    rho1: float
    rho2: float
    rho3: float


def _check_direction(traj: Trajectory, direction: Direction):
    if abs(direction.beta_parallel - traj.beta_parallel) > 1e-12:
        raise ValueError("direction was built for a different drift speed")


def _require_transverse(traj: Trajectory, what: str):
    if traj.is_transverse_degenerate:
        raise DegenerateTransverseMotion(
            f"{what} undefined: transverse velocity vanishes on the period "
            "(planar or zero field)")


def _rho1_integrand(traj: Trajectory, direction: Direction) -> np.ndarray:
    e = direction.e_vec
    ebp = e[0] * traj.beta[:, 0] + e[1] * traj.beta[:, 1]
    b3 = traj.beta[:, 2]
    return ((1.0 - ebp) ** 2 - b3 ** 2 * e[2] ** 2) / b3 ** 2


def _rho3_integrand(traj: Trajectory) -> np.ndarray:
    b1, b2 = traj.beta[:, 0], traj.beta[:, 1]
    bd1, bd2 = traj.beta_dot_perp[:, 0], traj.beta_dot_perp[:, 1]
    return traj.beta_total * (bd2 * b1 - bd1 * b2) / (traj.beta[:, 2] * (b1 * b1 + b2 * b2))


def _rho2_integrand(traj: Trajectory, direction: Direction) -> np.ndarray:
    """Integrand of the spin-linear frequency functional, as a function of
    lab time (the z measure dz/p becomes dt/gamma)."""
    e = direction.e_vec
    b1, b2, b3 = traj.beta[:, 0], traj.beta[:, 1], traj.beta[:, 2]
    bd1, bd2 = traj.beta_dot_perp[:, 0], traj.beta_dot_perp[:, 1]
    g = traj.gamma
    beta = traj.beta_total
    bp2 = b1 * b1 + b2 * b2
    ebp = e[0] * b1 + e[1] * b2
    t1 = (b2 * e[0] - b1 * e[1]) / (g * bp2)
    t2 = (bd2 * b1 - bd1 * b2) / (b3 * bp2)
    t3 = bp2 / (g * beta ** 2 * b3 ** 2) - ebp / (g ** 3 * bp2 * b3 ** 2)
    t4 = g * g * (bp2 - 2.0 * b3 ** 2)
    return t1 - t2 * t3 * t4


def rho_functions(traj: Trajectory, direction: Direction) -> RhoValues:
    """Evaluate the four period functionals for one emission direction.

    Raises DegenerateTransverseMotion when the transverse speed has zeros
    (then rho2 and rho3 do not exist; spin machinery is unavailable).
    """
    _check_direction(traj, direction)
    e = direction.e_vec
    ebp_mean = float(np.mean(e[0] * traj.beta[:, 0] + e[1] * traj.beta[:, 1]))
    rho0 = (1.0 - ebp_mean) / traj.beta_parallel
    rho1 = traj.period_t * float(np.mean(_rho1_integrand(traj, direction)))
    _require_transverse(traj, "rho2/rho3")
    rho3 = traj.period_t * float(np.mean(_rho3_integrand(traj)))
    rho2 = (traj.beta_total * traj.period_t / PERIOD_L) * \
        float(np.mean(_rho2_integrand(traj, direction)))
    return RhoValues(rho0=rho0, rho1=rho1, rho2=rho2, rho3=rho3)


def classical_frequency(traj: Trajectory, direction: Direction, n: int,
                        spin_initial: int = 1, spin_final: int = 1) -> float:
    """Emission frequency in units of omega0 before quantum corrections:
    n/psi0 without spin flip, shifted by the spin phase rate with flip."""
    _check_direction(traj, direction)
    if spin_initial == spin_final:
        shift = 0.0
    else:
        _require_transverse(traj, "spin-flip frequency")
        rho3 = traj.period_t * float(np.mean(_rho3_integrand(traj)))
        shift = 0.5 * (spin_initial - spin_final) * rho3 / (2.0 * np.pi)
    return (n - shift) / direction.psi0


def radiation_frequency(traj: Trajectory, direction: Direction, n: int,
                        spin_initial: int, spin_final: int, chi: float) -> float:
    """Photon frequency of harmonic n in units of omega0, to first order in
    the quantum parameter chi.

    For a transverse-degenerate (planar) trajectory the spin-linear part of
    the correction is averaged away; a flip channel is refused outright.
    """
    _check_direction(traj, direction)
    if n < 1 and spin_initial == spin_final:
        raise ValueError("harmonic must be >= 1 without spin flip")
    if spin_initial not in (-1, 1) or spin_final not in (-1, 1):
        raise ValueError("spins must be +1 or -1")
    if chi < 0:
        raise ValueError("chi must be >= 0")
    w_cl = classical_frequency(traj, direction, n, spin_initial, spin_final)
    if w_cl <= 0.0:
        raise NoKinematicSupport(
            f"no positive frequency in channel n={n}, spins "
            f"{spin_initial}->{spin_final}")
    if chi == 0.0:
        return w_cl
    psi0 = direction.psi0
    rho1 = traj.period_t * float(np.mean(_rho1_integrand(traj, direction)))
    hbar = chi * traj.gamma / traj.omega0
    term1 = 0.5 * hbar * (w_cl * traj.omega0) / traj.gamma * rho1 / (psi0 * traj.period_t)
    if traj.is_transverse_degenerate:
        term2 = 0.0  # spin-averaged; the linear-in-spin piece has no limit here
    else:
        rho2 = (traj.beta_total * traj.period_t / PERIOD_L) * \
            float(np.mean(_rho2_integrand(traj, direction)))
        term2 = 0.5 * hbar * (traj.beta_parallel / psi0) * spin_final * rho2
    rel = term1 + term2
    if abs(rel) > 0.5:
        raise QuantumParameterTooLarge(
            f"first-order frequency shift {rel:.3g} of the classical value "
            f"at n={n}; chi too large for this harmonic")
    return w_cl * (1.0 - rel)


# -- internal helpers shared by the radiation integrals ---------------------

def direction_phase_parts(traj: Trajectory, direction: Direction) -> np.ndarray:
    """Periodic part of ct - (r(t), n): the full function is
    psi0 * t + (returned samples)."""
    _check_direction(traj, direction)
    e = direction.e_vec
    return -(traj.pos @ e)


def rho1_cumulative(traj: Trajectory, direction: Direction):
    """(rate, periodic part) of the running rho1 integral."""
    return cumulative_periodic(_rho1_integrand(traj, direction), traj.period_t)


def rho2_cumulative(traj: Trajectory, direction: Direction):
    """(rate, periodic part) of the running spin-linear phase integral,
    in the same normalization that multiplies hbar/2 in the phase."""
    _require_transverse(traj, "spin-linear phase")
    samples = _rho2_integrand(traj, direction) * traj.beta_total
    return cumulative_periodic(samples, traj.period_t)


def rho3_cumulative(traj: Trajectory):
    """(rate, periodic part) of the running spin rotation phase."""
    _require_transverse(traj, "spin rotation phase")
    return cumulative_periodic(_rho3_integrand(traj), traj.period_t)
