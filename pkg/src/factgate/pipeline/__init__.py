from factgate.pipeline.config import ConfigInvalid, PipelineConfig, SourceSpec, load_config
from factgate.pipeline.orchestrator import (
    ClaimVerdict,
    GateDecision,
    NoSourcesAvailable,
    Pipeline,
    PipelineHolder,
    VerifiedResponse,
)

__all__ = [
    "ClaimVerdict",
    "ConfigInvalid",
    "GateDecision",
    "NoSourcesAvailable",
    "Pipeline",
    "PipelineConfig",
    "PipelineHolder",
    "SourceSpec",
    "VerifiedResponse",
    "load_config",
]
