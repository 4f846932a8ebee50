"""Exception hierarchy and diagnostic warning category."""


class UndulatorError(Exception):
    """Base class for all errors raised by this package."""


class UndulatorRegimeViolation(UndulatorError):
    """Field too strong for the requested energy: the longitudinal momentum
    would vanish somewhere on the period (turning point), so the periodic
    drift motion assumed everywhere in this package does not exist."""


class NonConvergence(UndulatorError):
    """An iterative solve (drift root-find, harmonic quadrature) failed to
    reach its tolerance."""


class DegenerateTransverseMotion(UndulatorError):
    """Transverse velocity vanishes somewhere on the period; the spin phase
    and spin-dependent integrands are 0/0 there. Planar fields end up here:
    they get classical and spin-averaged quantum results only."""


class QuantumParameterTooLarge(UndulatorError):
    """First-order frequency correction exceeds half the classical value;
    the semiclassical expansion is meaningless at this harmonic."""


class ExpansionInvalid(UndulatorError):
    """Quantum correction to the total power is outside the first-order
    expansion's domain of validity."""


class HarmonicBeyondValidity(UndulatorError):
    """Requested harmonic is at or beyond the critical number where the
    quantum correction becomes comparable to the classical term."""


class OrderOverflow(UndulatorError):
    """Bessel order or argument outside the supported range."""


class GridMismatch(UndulatorError):
    """Sampled-function inputs do not share one uniform grid."""


class NoKinematicSupport(UndulatorError):
    """Energy conservation leaves no positive photon frequency for the
    requested transition channel."""


class PolarizationRegimeViolation(UndulatorError):
    """Self-polarization formulas requested far outside the small-deflection
    condition under which they were derived."""


class ConfigError(UndulatorError):
    """Run configuration failed to parse or validate."""


class RegimeWarning(UserWarning):
    """Non-fatal diagnostic: inputs are drifting outside a formula's stated
    domain of validity. Emitted on stderr, never mixed into data output."""
