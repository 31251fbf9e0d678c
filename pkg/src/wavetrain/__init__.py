"""Traveling-wave stability analysis and chaos diagnostics for
two-species reaction-diffusion models."""

from .model import (
    ConfigError,
    FixedPoint,
    ModelError,
    ModelSpec,
    ParameterAbsent,
    Params,
    PARAM_KEYS,
    SYSTEM_IDS,
    evaluate_rhs,
    fixed_points,
    jacobian_at,
    make_preset,
    physical_fixed_point,
    spec_from_mapping,
)
from .stability import (
    CharCoeffs,
    CriticalSpeeds,
    CurveStructureError,
    EigenSet,
    FrequencyUndefined,
    HopfAnalysis,
    NoComplexPair,
    RouthHurwitzReport,
    StabilityError,
    VolumeRate,
    char_coeffs,
    classify_regime,
    coeffs_at,
    critical_speeds,
    degenerate_frequencies,
    hopf_analysis,
    hopf_curve,
    hopf_frequency,
    quartic_roots,
    routh_hurwitz,
    transversality,
    volume_rate,
)
from .integrate import (
    DEFAULT_IC,
    IntegrationError,
    IntegrationOptions,
    OscillationSummary,
    PeakCountError,
    StiffnessError,
    Trajectory,
    find_peaks,
    integrate,
    resample_series,
    summarize_oscillation,
    write_trajectory_csv,
)
from .diagnostics import (
    DiagnosticsError,
    FractalEstimate,
    Spectrum,
    attractor_points,
    autocorrelation,
    cluster_fractal_dimension,
    power_spectral_density,
    spectral_flatness,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "FixedPoint", "ModelError", "ModelSpec",
    "ParameterAbsent", "Params", "PARAM_KEYS", "SYSTEM_IDS",
    "evaluate_rhs", "fixed_points", "jacobian_at", "make_preset",
    "physical_fixed_point", "spec_from_mapping",
    "CharCoeffs", "CriticalSpeeds", "CurveStructureError", "EigenSet",
    "FrequencyUndefined", "HopfAnalysis", "NoComplexPair",
    "RouthHurwitzReport", "StabilityError", "VolumeRate", "char_coeffs",
    "classify_regime", "coeffs_at", "critical_speeds",
    "degenerate_frequencies", "hopf_analysis", "hopf_curve",
    "hopf_frequency", "quartic_roots", "routh_hurwitz", "transversality",
    "volume_rate",
    "DEFAULT_IC", "IntegrationError", "IntegrationOptions",
    "OscillationSummary", "PeakCountError", "StiffnessError", "Trajectory",
    "find_peaks", "integrate", "resample_series", "summarize_oscillation",
    "write_trajectory_csv",
    "DiagnosticsError", "FractalEstimate", "Spectrum", "attractor_points",
    "autocorrelation", "cluster_fractal_dimension",
    "power_spectral_density", "spectral_flatness",
    "__version__",
]
