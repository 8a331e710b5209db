from factgate.confidence.backend import KERNEL_BACKEND, get_kernels
from factgate.confidence.calibration import (
    CalibrationReport,
    EmptyInput,
    apply_temperature,
    expected_calibration_error,
    fit_temperature,
    learn_weights,
    simplex_grid,
)
from factgate.confidence.providers import (
    ConstantProvider,
    IntrinsicProvider,
    ProviderUnavailable,
    SampleAgreementProvider,
    SuppliedConfidenceProvider,
    safe_intrinsic,
)
from factgate.confidence.scoring import (
    ConfidenceBreakdown,
    WeightsOffSimplex,
    build_breakdown,
    coherence_score,
    combine_confidence,
    external_confidence,
    validate_simplex,
)

__all__ = [
    "CalibrationReport",
    "ConfidenceBreakdown",
    "ConstantProvider",
    "EmptyInput",
    "IntrinsicProvider",
    "KERNEL_BACKEND",
    "ProviderUnavailable",
    "SampleAgreementProvider",
    "SuppliedConfidenceProvider",
    "WeightsOffSimplex",
    "apply_temperature",
    "build_breakdown",
    "coherence_score",
    "combine_confidence",
    "expected_calibration_error",
    "external_confidence",
    "fit_temperature",
    "get_kernels",
    "learn_weights",
    "safe_intrinsic",
    "simplex_grid",
    "validate_simplex",
]
