"""Pipeline configuration: TOML file with sections for the service,
pipeline thresholds, confidence weights, fusion, cache, extractor,
correction templates, and a [[sources]] table per knowledge source.

Scalar settings are overridable through VERIFY_<SECTION>_<KEY> environment
variables (e.g. VERIFY_PIPELINE_TAU_CONFIDENCE=0.8).
"""

from __future__ import annotations

import datetime as dt
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from factgate.correction.engine import CorrectionConfig
from factgate.fusion.pool import FusionConfig
from factgate.sources.base import SourceKind

ENV_PREFIX = "VERIFY_"
ENV_SCALAR_SECTIONS = ("pipeline", "service", "confidence", "fusion", "cache", "correction")


class ConfigInvalid(ValueError):
    """Configuration rejected; the message names the offending field."""


@dataclass(frozen=True)
class SourceSpec:
    source_id: str
    kind: SourceKind
    reliability: float
    weight: float
    timeout_ms: float = 800.0
    max_results: int = 10
    path: Path | None = None  # knowledge_graph / domain_db
    endpoint: str | None = None  # web_search


@dataclass
class PipelineConfig:
    tau_confidence: float = 0.7
    evidence_budget_ms: float = 800.0
    deterministic_output: bool = False
    enabled_sources: list[str] | None = None  # None = every declared source

    confidence_weights: tuple[float, float, float] = (0.3, 0.5, 0.2)
    intrinsic_provider: str = "constant"  # constant | supplied | sample_agreement
    intrinsic_value: float = 0.5
    intrinsic_alternatives: list[str] = field(default_factory=list)

    fusion: FusionConfig = field(default_factory=FusionConfig)
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)

    cache_capacity: int = 1000
    cache_ttl_seconds: float = 300.0

    bind: str = "127.0.0.1:8080"
    max_concurrent: int = 100

    vocab_file: Path | None = None
    alias_file: Path | None = None
    sources: list[SourceSpec] = field(default_factory=list)
    config_path: Path | None = None

    def __post_init__(self):
        if not 0.0 <= self.tau_confidence <= 1.0:
            raise ConfigInvalid(f"pipeline.tau_confidence must be in [0,1]: {self.tau_confidence}")
        if self.evidence_budget_ms <= 0:
            raise ConfigInvalid(f"pipeline.evidence_budget_ms must be positive: {self.evidence_budget_ms}")
        if any(w < 0 for w in self.confidence_weights) or abs(sum(self.confidence_weights) - 1.0) > 1e-9:
            raise ConfigInvalid(f"confidence weights must form a simplex: {self.confidence_weights}")
        if self.intrinsic_provider not in ("constant", "supplied", "sample_agreement"):
            raise ConfigInvalid(f"confidence.intrinsic_provider unknown: {self.intrinsic_provider!r}")
        if self.cache_capacity < 1:
            raise ConfigInvalid(f"cache.capacity must be >= 1: {self.cache_capacity}")
        if self.max_concurrent < 1:
            raise ConfigInvalid(f"service.max_concurrent must be >= 1: {self.max_concurrent}")
        ids = [s.source_id for s in self.sources]
        if len(set(ids)) != len(ids):
            raise ConfigInvalid(f"duplicate source ids: {ids}")
        # a config may declare no sources only when the pipeline is built
        # with injected source handles; Pipeline enforces the final invariant
        if self.sources and not self.active_sources():
            raise ConfigInvalid("at least one enabled source is required")
        known = set(ids)
        for sid in self.enabled_sources or []:
            if sid not in known:
                raise ConfigInvalid(f"pipeline.enabled_sources names unknown source {sid!r}")

    def active_sources(self) -> list[SourceSpec]:
        if self.enabled_sources is None:
            return list(self.sources)
        wanted = set(self.enabled_sources)
        return [s for s in self.sources if s.source_id in wanted]

    def with_enabled(self, source_ids: list[str]) -> "PipelineConfig":
        return replace(self, enabled_sources=list(source_ids))

    def to_public_dict(self) -> dict:
        return {
            "pipeline": {
                "tau_confidence": self.tau_confidence,
                "evidence_budget_ms": self.evidence_budget_ms,
                "deterministic_output": self.deterministic_output,
                "enabled_sources": sorted(s.source_id for s in self.active_sources()),
            },
            "confidence": {
                "alpha": self.confidence_weights[0],
                "beta": self.confidence_weights[1],
                "gamma": self.confidence_weights[2],
                "intrinsic_provider": self.intrinsic_provider,
            },
            "fusion": {
                "tau_consistency": self.fusion.tau_consistency,
                "stance_margin": self.fusion.stance_margin,
                "half_life_days": self.fusion.half_life_days,
                "as_of": self.fusion.as_of.isoformat() if self.fusion.as_of else None,
            },
            "cache": {"capacity": self.cache_capacity, "ttl_seconds": self.cache_ttl_seconds},
            "sources": [
                {
                    "id": s.source_id,
                    "kind": s.kind.value,
                    "reliability": s.reliability,
                    "weight": s.weight,
                    "timeout_ms": s.timeout_ms,
                    "max_results": s.max_results,
                }
                for s in self.sources
            ],
        }


def _coerce(raw: str, like) -> object:
    if isinstance(like, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(like, int) and not isinstance(like, bool):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


def apply_env_overrides(data: dict, environ=None) -> dict:
    """VERIFY_<SECTION>_<KEY> overrides scalar keys in known sections."""
    environ = os.environ if environ is None else environ
    for section in ENV_SCALAR_SECTIONS:
        table = data.get(section)
        if not isinstance(table, dict):
            continue
        for key, current in list(table.items()):
            if isinstance(current, (dict, list)):
                continue
            env_name = f"{ENV_PREFIX}{section.upper()}_{key.upper()}"
            if env_name in environ:
                try:
                    table[key] = _coerce(environ[env_name], current)
                except ValueError as exc:
                    raise ConfigInvalid(f"{env_name}: {exc}") from exc
    return data


def _source_from_table(table: dict, base_dir: Path, index: int) -> SourceSpec:
    try:
        kind = SourceKind(table["kind"])
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid(f"sources[{index}].kind invalid: {table.get('kind')!r}") from exc
    source_id = table.get("id")
    if not source_id:
        raise ConfigInvalid(f"sources[{index}].id is required")
    path = table.get("path")
    endpoint = table.get("endpoint")
    if kind is SourceKind.WEB_SEARCH:
        if not endpoint:
            raise ConfigInvalid(f"sources[{index}] ({source_id}): web_search requires endpoint")
    elif not path:
        raise ConfigInvalid(f"sources[{index}] ({source_id}): {kind.value} requires path")
    return SourceSpec(
        source_id=source_id,
        kind=kind,
        reliability=float(table.get("reliability", 0.8)),
        weight=float(table.get("weight", 1.0)),
        timeout_ms=float(table.get("timeout_ms", 800.0)),
        max_results=int(table.get("max_results", 10)),
        path=(base_dir / path) if path else None,
        endpoint=endpoint,
    )


def config_from_dict(data: dict, base_dir: Path, config_path: Path | None = None) -> PipelineConfig:
    pipeline = data.get("pipeline", {})
    service = data.get("service", {})
    confidence = data.get("confidence", {})
    fusion_table = data.get("fusion", {})
    cache = data.get("cache", {})
    extractor = data.get("extractor", {})
    correction = data.get("correction", {})

    as_of = fusion_table.get("as_of")
    if isinstance(as_of, str):
        as_of = dt.date.fromisoformat(as_of)
    elif isinstance(as_of, dt.datetime):
        as_of = as_of.date()
    try:
        fusion = FusionConfig(
            tau_consistency=float(fusion_table.get("tau_consistency", 0.5)),
            authority_coeff=float(fusion_table.get("authority_coeff", 0.5)),
            recency_coeff=float(fusion_table.get("recency_coeff", 0.3)),
            citation_coeff=float(fusion_table.get("citation_coeff", 0.2)),
            half_life_days=float(fusion_table.get("half_life_days", 365.0)),
            as_of=as_of,
            citation_ceiling=fusion_table.get("citation_ceiling"),
            stance_margin=float(fusion_table.get("stance_margin", 0.05)),
        )
    except ValueError as exc:
        raise ConfigInvalid(f"fusion: {exc}") from exc

    correction_config = CorrectionConfig(
        substitution_threshold=float(correction.get("substitution_threshold", 0.6)),
        cluster_margin=float(correction.get("cluster_margin", 0.05)),
        multi_value_mass=float(correction.get("multi_value_mass", 0.2)),
        hedge_phrase=correction.get("hedge_phrase", "It is uncertain whether "),
        attribution_labels=dict(correction.get("attribution_labels", {})),
    )

    sources = [
        _source_from_table(table, base_dir, i)
        for i, table in enumerate(data.get("sources", []))
    ]

    weights = (
        float(confidence.get("alpha", 0.3)),
        float(confidence.get("beta", 0.5)),
        float(confidence.get("gamma", 0.2)),
    )

    vocab_file = extractor.get("vocab_file")
    alias_file = extractor.get("alias_file")

    enabled = pipeline.get("enabled_sources")
    return PipelineConfig(
        tau_confidence=float(pipeline.get("tau_confidence", 0.7)),
        evidence_budget_ms=float(pipeline.get("evidence_budget_ms", 800.0)),
        deterministic_output=bool(pipeline.get("deterministic_output", False)),
        enabled_sources=list(enabled) if enabled is not None else None,
        confidence_weights=weights,
        intrinsic_provider=confidence.get("intrinsic_provider", "constant"),
        intrinsic_value=float(confidence.get("intrinsic_value", 0.5)),
        intrinsic_alternatives=list(confidence.get("alternatives", [])),
        fusion=fusion,
        correction=correction_config,
        cache_capacity=int(cache.get("capacity", 1000)),
        cache_ttl_seconds=float(cache.get("ttl_seconds", 300.0)),
        bind=service.get("bind", "127.0.0.1:8080"),
        max_concurrent=int(service.get("max_concurrent", 100)),
        vocab_file=(base_dir / vocab_file) if vocab_file else None,
        alias_file=(base_dir / alias_file) if alias_file else None,
        sources=sources,
        config_path=config_path,
    )


def load_config(path: str | Path, environ=None) -> PipelineConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
    apply_env_overrides(data, environ)
    return config_from_dict(data, path.parent.resolve(), path.resolve())
