from factgate.correction.engine import (
    Correction,
    CorrectionConfig,
    CorrectionStrategy,
    NotFlagged,
    SpanMismatch,
    StrategyDecision,
    apply_correction,
    apply_corrections,
    build_correction,
    select_strategy,
)

__all__ = [
    "Correction",
    "CorrectionConfig",
    "CorrectionStrategy",
    "NotFlagged",
    "SpanMismatch",
    "StrategyDecision",
    "apply_correction",
    "apply_corrections",
    "build_correction",
    "select_strategy",
]
