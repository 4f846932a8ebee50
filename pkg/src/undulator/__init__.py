"""Spontaneous radiation of an electron in a periodic magnetic undulator,
with the first-order quantum corrections and spin-flip self-polarization.

Two mutually validating computation paths are provided: a general-field
quadrature pipeline (any band-limited two-component field) and closed
Bessel forms for the helical undulator. Units: c = 1, electron mass 1,
elementary charge 1, field period 2 pi; powers come out in e0^2 omega0^2/c,
frequencies in units of the motion frequency omega0, rates in omega0. The
single quantum input is chi = hbar omega0 / E.
"""

from .errors import (
    ConfigError,
    DegenerateTransverseMotion,
    ExpansionInvalid,
    GridMismatch,
    HarmonicBeyondValidity,
    NoKinematicSupport,
    NonConvergence,
    OrderOverflow,
    PolarizationRegimeViolation,
    QuantumParameterTooLarge,
    RegimeWarning,
    UndulatorError,
    UndulatorRegimeViolation,
)
from .fields import FieldKind, FieldModel, field_harmonics, mean_square_field
from .helical import (
    AngularIntensity,
    HelixParams,
    boson_spectral_angular,
    helical_angular_power,
    helical_matrix_elements,
    helical_spectral_angular,
    helical_total_power_ultra,
)
from .kinematics import (
    Direction,
    RhoValues,
    Trajectory,
    deflection_parameter,
    radiation_frequency,
    rho_functions,
    solve_trajectory,
)
from .specfun import BesselEval, bessel_j, oscillatory_moment, pv_cot_double_integral
from .spectra import (
    RadiationResult,
    harmonic_power,
    matrix_element_no_flip,
    spectral_angular_power,
    total_power,
)
from .spin import (
    ALPHA_FS,
    SpinResult,
    flip_amplitudes_helical,
    flip_matrix_element,
    flip_probability,
    flip_probability_summed,
    polarization_characteristics,
    spin_asymmetry,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_FS",
    "AngularIntensity",
    "BesselEval",
    "ConfigError",
    "DegenerateTransverseMotion",
    "Direction",
    "ExpansionInvalid",
    "FieldKind",
    "FieldModel",
    "GridMismatch",
    "HarmonicBeyondValidity",
    "HelixParams",
    "NoKinematicSupport",
    "NonConvergence",
    "OrderOverflow",
    "PolarizationRegimeViolation",
    "QuantumParameterTooLarge",
    "RadiationResult",
    "RegimeWarning",
    "RhoValues",
    "SpinResult",
    "Trajectory",
    "UndulatorError",
    "UndulatorRegimeViolation",
    "bessel_j",
    "boson_spectral_angular",
    "deflection_parameter",
    "field_harmonics",
    "flip_amplitudes_helical",
    "flip_matrix_element",
    "flip_probability",
    "flip_probability_summed",
    "harmonic_power",
    "helical_angular_power",
    "helical_matrix_elements",
    "helical_spectral_angular",
    "helical_total_power_ultra",
    "matrix_element_no_flip",
    "mean_square_field",
    "oscillatory_moment",
    "polarization_characteristics",
    "pv_cot_double_integral",
    "radiation_frequency",
    "rho_functions",
    "solve_trajectory",
    "spectral_angular_power",
    "spin_asymmetry",
    "total_power",
]
