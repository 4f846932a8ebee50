"""Periodic two-component undulator magnetic fields.

Internal units throughout the package: c = 1, electron mass 1, elementary
charge 1, and field period L = 2 pi, so the field wavenumber is unity and
every output is a pure number. A field model stores the complex harmonic
coefficients h[k, n] of its magnetic field,

    H_k(z) = sum_n 2 Re{ h[k, n] exp(i n z) },   k = 1, 2,  n = 1..n_band,

which makes all models band-limited by construction. The vector potential
A = (A_1, A_2, 0) follows from H = (-dA_2/dz, dA_1/dz, 0), integrated
term by term; the free additive constants in A are dropped.

The helical model has H = (-h0 cos z, -h0 sin z, 0); its strength relates
to the transverse speed of the matched drift-free orbit by
beta_perp = h0 / gamma.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergence

PERIOD_L = 2.0 * np.pi


class FieldKind(enum.Enum):
    HELICAL = "helical"
    PLANAR = "planar"
    FOURIER = "fourier"


@dataclass(frozen=True)
class FieldModel:
    """Immutable periodic field; safe for concurrent reads.

    Attributes
    ----------
    kind : FieldKind
        Analytic family the model was built from.
    amplitude_h0 : float
        Defining strength for the helical / planar families (0 for a
        generic Fourier model).
    period_l : float
        Always 2 pi in internal units.
    harmonics : ndarray, shape (n_band, 2), complex
        Coefficients h[k, n] of exp(i n z), n = 1..n_band, per transverse
        component.
    """

    kind: FieldKind
    amplitude_h0: float
    harmonics: np.ndarray
    period_l: float = PERIOD_L

    # -- constructors ---------------------------------------------------

    @staticmethod
    def helical(amplitude_h0: float) -> "FieldModel":
        """Rotating field H = (-h0 cos z, -h0 sin z, 0)."""
        h = np.zeros((1, 2), dtype=complex)
        h[0, 0] = -0.5 * amplitude_h0
        h[0, 1] = 0.5j * amplitude_h0
        return FieldModel(FieldKind.HELICAL, float(amplitude_h0), h)

    @staticmethod
    def helical_from_transverse_speed(beta_perp: float, gamma: float) -> "FieldModel":
        """Helical field whose matched drift-free orbit has the given
        transverse speed at Lorentz factor gamma (beta_perp = h0/gamma)."""
        return FieldModel.helical(beta_perp * gamma)

    @staticmethod
    def planar(amplitude_h0: float, harmonic: int = 1) -> "FieldModel":
        """One-component field H = (-h0 cos(k z), 0, 0)."""
        if harmonic < 1:
            raise ValueError("harmonic must be >= 1")
        h = np.zeros((harmonic, 2), dtype=complex)
        h[harmonic - 1, 0] = -0.5 * amplitude_h0
        return FieldModel(FieldKind.PLANAR, float(amplitude_h0), h)

    @staticmethod
    def from_harmonic_rows(rows) -> "FieldModel":
        """Build a Fourier model from rows [n, re1, im1, re2, im2].

        This is the wire format of the JSON config's field block. Missing
        harmonics are zero; duplicate n accumulate.
        """
        rows = [list(map(float, r)) for r in rows]
        if not rows:
            return FieldModel(FieldKind.FOURIER, 0.0, np.zeros((0, 2), dtype=complex))
        n_band = int(max(r[0] for r in rows))
        h = np.zeros((n_band, 2), dtype=complex)
        for n, re1, im1, re2, im2 in rows:
            k = int(n)
            if k < 1 or k != n:
                raise ValueError("harmonic index must be a positive integer")
            h[k - 1, 0] += re1 + 1j * im1
            h[k - 1, 1] += re2 + 1j * im2
        return FieldModel(FieldKind.FOURIER, 0.0, h)

    @staticmethod
    def zero() -> "FieldModel":
        return FieldModel(FieldKind.FOURIER, 0.0, np.zeros((0, 2), dtype=complex))

    # -- evaluation -----------------------------------------------------

    @property
    def n_band(self) -> int:
        return self.harmonics.shape[0]

    def _modes(self, z):
        """exp(i n z) for n = 1..n_band, shape (..., n_band)."""
        z = np.asarray(z, dtype=float)
        n = np.arange(1, self.n_band + 1)
        return np.exp(1j * np.multiply.outer(z, n))

    def vector_potential(self, z):
        """Both transverse components of A at z (third component is zero).

        Returns a pair of arrays shaped like z. Total function: periodicity
        extends the domain to all reals.
        """
        z = np.asarray(z, dtype=float)
        if self.n_band == 0:
            return np.zeros_like(z), np.zeros_like(z)
        m = self._modes(z)
        n = np.arange(1, self.n_band + 1)
        a1 = 2.0 * np.real(m @ (self.harmonics[:, 1] / (1j * n)))
        a2 = -2.0 * np.real(m @ (self.harmonics[:, 0] / (1j * n)))
        return a1, a2

    def magnetic_field(self, z):
        """H = (-dA2/dz, dA1/dz) evaluated analytically."""
        z = np.asarray(z, dtype=float)
        if self.n_band == 0:
            return np.zeros_like(z), np.zeros_like(z)
        m = self._modes(z)
        h1 = 2.0 * np.real(m @ self.harmonics[:, 0])
        h2 = 2.0 * np.real(m @ self.harmonics[:, 1])
        return h1, h2

    def magnetic_field_derivative(self, z):
        """dH/dz, analytic; used for the second velocity derivative."""
        z = np.asarray(z, dtype=float)
        if self.n_band == 0:
            return np.zeros_like(z), np.zeros_like(z)
        m = self._modes(z)
        n = np.arange(1, self.n_band + 1)
        d1 = 2.0 * np.real(m @ (1j * n * self.harmonics[:, 0]))
        d2 = 2.0 * np.real(m @ (1j * n * self.harmonics[:, 1]))
        return d1, d2


def field_harmonics(model: FieldModel, n_max: int) -> np.ndarray:
    """Fourier coefficients (1/L) integral of H_k(z) exp(+i n z) dz.

    Returns an (n_max, 2) complex array for n = 1..n_max. Uniform-grid
    quadrature, cross-checked at doubled resolution; a mismatch means the
    model is not band-limited as promised and raises NonConvergence.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")

    def _coeffs(n_grid: int) -> np.ndarray:
        z = PERIOD_L * np.arange(n_grid) / n_grid
        h1, h2 = model.magnetic_field(z)
        # mean of H_k * exp(i n z) equals conj(DFT)/N at bin n
        f1 = np.conj(np.fft.fft(h1))[1:n_max + 1] / n_grid
        f2 = np.conj(np.fft.fft(h2))[1:n_max + 1] / n_grid
        return np.stack([f1, f2], axis=1)

    n_grid = 1 << max(8, (2 * (model.n_band + n_max) + 1).bit_length())
    c = _coeffs(n_grid)
    c2 = _coeffs(2 * n_grid)
    scale = max(np.max(np.abs(c2)), 1.0)
    if np.max(np.abs(c - c2)) > 1e-12 * scale:
        raise NonConvergence("field harmonic quadrature did not converge")
    return c2


def mean_square_field(model: FieldModel):
    """(1/L) integral of |H(z)|^2 over one period."""
    n_grid = 1 << max(8, (4 * (model.n_band + 1)).bit_length())
    z = PERIOD_L * np.arange(n_grid) / n_grid
    h1, h2 = model.magnetic_field(z)
    return float(np.mean(h1 * h1 + h2 * h2))
