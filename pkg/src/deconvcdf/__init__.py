"""CDF estimation from error-contaminated observations.

Given ``Y = X + eps`` with a known (or repeatedly measured) error law,
the package estimates the distribution function of the unobserved
``X``: a characteristic-function inversion estimator with a data-driven
frequency cutoff, plus ECDF and simulation-extrapolation baselines, an
interval construction, a Monte Carlo lab, and a command-line interface.
"""

__version__ = "0.1.0"

from .bandwidth import (
    BandwidthValue,
    CalibrationConfig,
    CalibrationResult,
    LepskiConfig,
    StandardizingTransform,
    adaptive_estimate,
    calibrate_tuning_constant,
    default_cutoff_grid,
    lepski_select,
    minimax_bandwidth,
    select_stable_index,
    smoothness_free_bandwidth,
    standardize,
    tuning_constant,
    variance_constant,
)
from .error_models import (
    CenteredGammaError,
    ErrorModel,
    GammaError,
    LaplaceError,
    NoError,
    NormalError,
    SmoothnessConstants,
    parse_error_model,
    preset_model,
)
from .estimators import DeconvolutionCDF, EmpiricalCDF, SimexCDF
from .inference import (
    ConfidenceInterval,
    RepeatedMeasuresStats,
    confidence_interval,
    repeated_measures_stats,
    sensitivity_grid,
    sensitivity_scan,
    variance_of_error_variance,
)
from .kernels import (
    DeconvEstimate,
    QuadConfig,
    ecf,
    estimate_cdf,
    inversion_kernel,
    inversion_kernel_grid,
    sine_integral,
)
from .simex import (
    SimexConfig,
    SimexEstimate,
    ecdf,
    quad_extrapolate,
    simex_estimate,
)

__all__ = [
    "__version__",
    "BandwidthValue",
    "CalibrationConfig",
    "CalibrationResult",
    "CenteredGammaError",
    "ConfidenceInterval",
    "DeconvEstimate",
    "DeconvolutionCDF",
    "EmpiricalCDF",
    "ErrorModel",
    "GammaError",
    "LaplaceError",
    "LepskiConfig",
    "NoError",
    "NormalError",
    "QuadConfig",
    "RepeatedMeasuresStats",
    "SimexCDF",
    "SimexConfig",
    "SimexEstimate",
    "SmoothnessConstants",
    "StandardizingTransform",
    "adaptive_estimate",
    "calibrate_tuning_constant",
    "confidence_interval",
    "default_cutoff_grid",
    "ecdf",
    "ecf",
    "estimate_cdf",
    "inversion_kernel",
    "inversion_kernel_grid",
    "lepski_select",
    "minimax_bandwidth",
    "parse_error_model",
    "preset_model",
    "quad_extrapolate",
    "repeated_measures_stats",
    "select_stable_index",
    "sensitivity_grid",
    "sensitivity_scan",
    "simex_estimate",
    "sine_integral",
    "smoothness_free_bandwidth",
    "standardize",
    "tuning_constant",
    "variance_constant",
    "variance_of_error_variance",
]
