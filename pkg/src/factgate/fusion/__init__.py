from factgate.fusion.pool import (
    ConsistencyReport,
    FusionConfig,
    NegativeWeightError,
    build_report,
    check_consistency,
    citation_norm,
    fuse_posterior,
    merge_value_labels,
    quality_components,
    recency_score,
    strength_from_components,
    validate_response,
    weight_evidence,
)

__all__ = [
    "ConsistencyReport",
    "FusionConfig",
    "NegativeWeightError",
    "build_report",
    "check_consistency",
    "citation_norm",
    "fuse_posterior",
    "merge_value_labels",
    "quality_components",
    "recency_score",
    "strength_from_components",
    "validate_response",
    "weight_evidence",
]
