"""End-to-end verification pipeline.

verify(): extraction -> parallel evidence fan-out under one latency budget
-> fusion -> confidence -> gate -> correction -> single re-verification
with rollback if the evidence score got worse. Source queries for all
claims launch together and share the budget; a late source is recorded as
degraded and contributes INSUFFICIENT evidence, never a stall.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from factgate.claims.extractor import ExtractorConfig, extract_claims
from factgate.claims.linking import AliasTable
from factgate.claims.model import Claim
from factgate.confidence.providers import (
    ConstantProvider,
    IntrinsicProvider,
    SampleAgreementProvider,
    SuppliedConfidenceProvider,
    safe_intrinsic,
)
from factgate.confidence.scoring import (
    ConfidenceBreakdown,
    coherence_score,
    combine_confidence,
    external_confidence,
)
from factgate.correction.engine import (
    Correction,
    CorrectionStrategy,
    apply_corrections,
    build_correction,
    select_strategy,
)
from factgate.fusion.pool import ConsistencyReport, build_report
from factgate.pipeline.config import PipelineConfig, SourceSpec, load_config
from factgate.pipeline.jsonio import claim_to_dict, span_to_list, value_to_dict
from factgate.sources.base import Evidence, SourceKind, SourceTimeout, SourceUnavailable
from factgate.sources.cache import VerdictCache, claim_fingerprint
from factgate.sources.corpus import CorpusIndex, DomainCorpusSource
from factgate.sources.triplestore import KnowledgeGraphSource, TripleStore
from factgate.sources.webadapter import WebSearchSource

log = logging.getLogger(__name__)

MAX_FANOUT_WORKERS = 64
E_SCORE_EPSILON = 1e-12


class NoSourcesAvailable(Exception):
    """Every enabled source failed; the response is returned unverified."""


class GateDecision(Enum):
    PASS = "PASS"
    CORRECTED = "CORRECTED"
    HEDGED = "HEDGED"
    ATTRIBUTED = "ATTRIBUTED"
    ROLLED_BACK = "ROLLED_BACK"


_STRATEGY_GATE = {
    CorrectionStrategy.SUBSTITUTE: GateDecision.CORRECTED,
    CorrectionStrategy.HEDGE: GateDecision.HEDGED,
    CorrectionStrategy.ATTRIBUTE: GateDecision.ATTRIBUTED,
}


@dataclass
class ClaimVerdict:
    claim: Claim
    report: ConsistencyReport
    breakdown: ConfidenceBreakdown
    gate: GateDecision

    def to_dict(self) -> dict:
        posterior = [
            {"value": value_to_dict(v), "probability": p}
            for v, p in self.report.fused_posterior.items()
        ]
        labels = [
            {"value": value_to_dict(v), "label": label}
            for v, label in sorted(self.report.value_labels.items(), key=lambda kv: kv[0].sort_key())
        ]
        return {
            "claim": claim_to_dict(self.claim),
            "consistency": {
                "consistency": self.report.consistency,
                "strength": self.report.strength,
                "fused_posterior": posterior,
                "contradiction": self.report.contradiction,
                "contributing_sources": list(self.report.contributing_sources),
                "value_labels": labels,
            },
            "confidence": {
                "intrinsic": self.breakdown.intrinsic,
                "external": self.breakdown.external,
                "coherence": self.breakdown.coherence,
                "combined": self.breakdown.combined,
                "weights_used": list(self.breakdown.weights_used),
                "intrinsic_fallback": self.breakdown.intrinsic_fallback,
            },
            "gate": self.gate.value,
        }


@dataclass
class VerifiedResponse:
    original_text: str
    final_text: str
    e_score: float
    verdicts: list[ClaimVerdict] = field(default_factory=list)
    corrections: list[Correction] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    degraded_sources: list[str] = field(default_factory=list)
    rolled_back: bool = False
    unverified: bool = False
    warnings: list[str] = field(default_factory=list)

    def to_dict(self, deterministic: bool = False) -> dict:
        timings = {k: 0.0 for k in self.timings} if deterministic else dict(self.timings)
        return {
            "original_text": self.original_text,
            "final_text": self.final_text,
            "e_score": self.e_score,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "corrections": [
                {
                    "claim_id": c.claim_id,
                    "strategy": c.strategy.value,
                    "original_span": span_to_list(c.original_span),
                    "replacement_text": c.replacement_text,
                    "cited_sources": list(c.cited_sources),
                    "posterior_mass_used": c.posterior_mass_used,
                }
                for c in self.corrections
            ],
            "timings": timings,
            "degraded_sources": list(self.degraded_sources),
            "rolled_back": self.rolled_back,
            "unverified": self.unverified,
            "warnings": list(self.warnings),
        }


def build_source(
    spec: SourceSpec,
    extractor_config: ExtractorConfig,
    alias_table: AliasTable | None,
    stance_margin: float,
):
    if spec.kind is SourceKind.KNOWLEDGE_GRAPH:
        store = TripleStore.load(spec.path)
        return KnowledgeGraphSource(
            _profile(spec), store, extractor_config.multi_valued, stance_margin
        )
    if spec.kind is SourceKind.DOMAIN_DB:
        index = CorpusIndex.load(spec.path)
        return DomainCorpusSource(_profile(spec), index, extractor_config, stance_margin)
    return WebSearchSource(
        _profile(spec), spec.endpoint, alias_table, extractor_config.multi_valued, stance_margin
    )


def _profile(spec: SourceSpec):
    from factgate.sources.base import SourceProfile

    return SourceProfile(
        source_id=spec.source_id,
        kind=spec.kind,
        base_reliability=spec.reliability,
        fusion_weight=spec.weight,
        timeout_ms=spec.timeout_ms,
        max_results=spec.max_results,
    )


class Pipeline:
    def __init__(self, config: PipelineConfig, sources: Mapping[str, object] | None = None):
        self.config = config
        self.alias_table = AliasTable.load(config.alias_file) if config.alias_file else None
        if config.vocab_file:
            self.extractor_config = ExtractorConfig.load(config.vocab_file, alias_table=self.alias_table)
        else:
            self.extractor_config = ExtractorConfig.default(alias_table=self.alias_table)
        if sources is not None:
            self.sources = dict(sources)
            self.weights = {sid: h.profile.fusion_weight for sid, h in self.sources.items()}
        else:
            self.sources = {
                spec.source_id: build_source(
                    spec, self.extractor_config, self.alias_table, config.fusion.stance_margin
                )
                for spec in config.active_sources()
            }
            self.weights = {spec.source_id: spec.weight for spec in config.active_sources()}
        if not self.sources:
            from factgate.pipeline.config import ConfigInvalid

            raise ConfigInvalid("at least one enabled source is required")
        self.cache = VerdictCache(config.cache_capacity, config.cache_ttl_seconds)
        self.provider = self._build_provider()

    @classmethod
    def from_config_file(cls, path: str | Path) -> "Pipeline":
        return cls(load_config(path))

    def _build_provider(self) -> IntrinsicProvider:
        if self.config.intrinsic_provider == "constant":
            return ConstantProvider(self.config.intrinsic_value)
        if self.config.intrinsic_provider == "supplied":
            return SuppliedConfidenceProvider()
        return SampleAgreementProvider(self.config.intrinsic_alternatives, self.extractor_config)

    # -- evidence fan-out ---------------------------------------------------

    def _gather_evidence(
        self, claims: Sequence[Claim]
    ) -> tuple[dict[str, list[Evidence]], list[str], bool]:
        """Query every enabled source for every claim concurrently, joining
        under the shared budget. Returns (evidence by claim id, degraded
        source ids, all_sources_failed)."""
        evidence: dict[str, list[Evidence]] = {c.id: [] for c in claims}
        degraded: set[str] = set()
        if not claims or not self.sources:
            return evidence, sorted(degraded), not self.sources

        budget_s = self.config.evidence_budget_ms / 1000.0
        tasks: dict[Future, tuple[Claim, str]] = {}
        executor = ThreadPoolExecutor(
            max_workers=min(len(claims) * len(self.sources), MAX_FANOUT_WORKERS)
        )
        try:
            for claim in claims:
                for source_id, handle in self.sources.items():
                    future = executor.submit(handle.query, claim)
                    tasks[future] = (claim, source_id)
            done, pending = wait(tasks, timeout=budget_s)
        finally:
            executor.shutdown(wait=False)

        answered_sources: set[str] = set()
        for future in done:
            claim, source_id = tasks[future]
            exc = future.exception()
            if exc is None:
                evidence[claim.id].append(future.result())
                answered_sources.add(source_id)
            elif isinstance(exc, SourceTimeout):
                degraded.add(source_id)
                answered_sources.add(source_id)
                timeout_ms = self.sources[source_id].profile.timeout_ms
                evidence[claim.id].append(
                    Evidence.insufficient(
                        source_id, claim.id,
                        self.sources[source_id].profile.base_reliability, timeout_ms,
                    )
                )
            elif isinstance(exc, SourceUnavailable):
                degraded.add(source_id)
                log.warning("source %s unavailable: %s", source_id, exc)
            else:
                degraded.add(source_id)
                log.error("source %s raised: %s", source_id, exc)
        for future in pending:
            claim, source_id = tasks[future]
            future.cancel()
            degraded.add(source_id)
            answered_sources.add(source_id)
            evidence[claim.id].append(
                Evidence.insufficient(
                    source_id, claim.id,
                    self.sources[source_id].profile.base_reliability,
                    self.config.evidence_budget_ms,
                )
            )
        all_failed = not answered_sources
        return evidence, sorted(degraded), all_failed

    # -- scoring ------------------------------------------------------------

    def _score_claims(
        self,
        claims: Sequence[Claim],
        evidence: Mapping[str, list[Evidence]],
        request_context: Mapping | None,
        warnings: list[str],
    ) -> tuple[dict[str, tuple[ConsistencyReport, ConfidenceBreakdown]], list[str]]:
        """Fuse evidence and score confidence per claim.

        The cache stores the evidence-derived core (report + coherence);
        intrinsic confidence is recomputed per request so a supplied
        per-request prior never leaks into later requests."""
        scored: dict[str, tuple[ConsistencyReport, ConfidenceBreakdown]] = {}
        cache_hits: list[str] = []
        for claim in claims:
            key = claim_fingerprint(claim)
            cached = self.cache.get(key)
            if cached is not None:
                cached_report, coherence = cached
                report = ConsistencyReport(
                    claim_id=claim.id,
                    consistency=cached_report.consistency,
                    strength=cached_report.strength,
                    fused_posterior=cached_report.fused_posterior,
                    contradiction=cached_report.contradiction,
                    contributing_sources=cached_report.contributing_sources,
                    value_labels=cached_report.value_labels,
                )
                cache_hits.append(claim.id)
            else:
                claim_evidence = evidence.get(claim.id, [])
                report = build_report(claim, claim_evidence, self.weights, self.config.fusion)
                coherence = coherence_score(claim, claim_evidence)
                self.cache.put(key, (report, coherence))
            intrinsic, fallback = safe_intrinsic(self.provider, claim, request_context)
            if fallback:
                warnings.append(f"intrinsic provider fell back to 0.5 for claim {claim.id}")
            external = external_confidence(report)
            breakdown = ConfidenceBreakdown(
                intrinsic=intrinsic,
                external=external,
                coherence=coherence,
                combined=combine_confidence(
                    intrinsic, external, coherence, self.config.confidence_weights
                ),
                weights_used=self.config.confidence_weights,
                intrinsic_fallback=fallback,
            )
            scored[claim.id] = (report, breakdown)
        return scored, cache_hits

    @staticmethod
    def _e_score(reports: Sequence[ConsistencyReport]) -> float:
        if not reports:
            return 1.0
        return sum(r.consistency * r.strength for r in reports) / len(reports)

    def _score_text(
        self, text: str, request_context: Mapping | None, warnings: list[str]
    ) -> tuple[float, list[str], bool]:
        """Extract + gather + score only; returns (e_score, degraded,
        all_failed). Used for the single re-verification pass."""
        claims = extract_claims(text, self.extractor_config)
        evidence, degraded, all_failed = self._gather_evidence(claims)
        scored, _ = self._score_claims(claims, evidence, request_context, warnings)
        reports = [scored[c.id][0] for c in claims]
        return self._e_score(reports), degraded, all_failed

    # -- public API ----------------------------------------------------------

    def verify(self, response_text: str, options: Mapping | None = None) -> VerifiedResponse:
        """Run the full verification pipeline over one response."""
        options = dict(options or {})
        warnings: list[str] = []
        timings: dict[str, float] = {}
        t_start = time.perf_counter()

        claims = extract_claims(response_text, self.extractor_config)
        timings["extract_ms"] = (time.perf_counter() - t_start) * 1000.0
        request_context = {
            "context": options.get("context"),
            "intrinsic_confidences": options.get("intrinsic_confidences"),
            "claim_index": {claim.id: i for i, claim in enumerate(claims)},
        }

        if not claims:
            timings["total_ms"] = (time.perf_counter() - t_start) * 1000.0
            return VerifiedResponse(
                original_text=response_text,
                final_text=response_text,
                e_score=1.0,
                timings=timings,
            )

        t_evidence = time.perf_counter()
        evidence, degraded, all_failed = self._gather_evidence(claims)
        timings["evidence_ms"] = (time.perf_counter() - t_evidence) * 1000.0

        if all_failed:
            warnings.append("all sources unavailable; response returned unverified")
            timings["total_ms"] = (time.perf_counter() - t_start) * 1000.0
            return VerifiedResponse(
                original_text=response_text,
                final_text=response_text,
                e_score=0.0,
                timings=timings,
                degraded_sources=degraded,
                unverified=True,
                warnings=warnings,
            )

        t_score = time.perf_counter()
        scored, _ = self._score_claims(claims, evidence, request_context, warnings)
        original_e = self._e_score([scored[c.id][0] for c in claims])
        timings["score_ms"] = (time.perf_counter() - t_score) * 1000.0

        t_correct = time.perf_counter()
        verdicts: list[ClaimVerdict] = []
        corrections: list[tuple[Claim, Correction]] = []
        for claim in claims:
            report, breakdown = scored[claim.id]
            if breakdown.combined > self.config.tau_confidence:
                verdicts.append(ClaimVerdict(claim, report, breakdown, GateDecision.PASS))
                continue
            decision = select_strategy(
                claim,
                report,
                breakdown,
                self.config.correction,
                self.config.tau_confidence,
                self.extractor_config.is_multi_valued(claim.predicate),
            )
            correction = build_correction(claim, report, decision, self.config.correction)
            corrections.append((claim, correction))
            verdicts.append(
                ClaimVerdict(claim, report, breakdown, _STRATEGY_GATE[decision.strategy])
            )
        timings["correction_ms"] = (time.perf_counter() - t_correct) * 1000.0

        final_text = response_text
        e_score = original_e
        rolled_back = False
        if corrections:
            corrected_text = apply_corrections(response_text, corrections)
            t_reverify = time.perf_counter()
            new_e, reverify_degraded, reverify_failed = self._score_text(
                corrected_text, request_context, warnings
            )
            timings["reverify_ms"] = (time.perf_counter() - t_reverify) * 1000.0
            degraded = sorted(set(degraded) | set(reverify_degraded))
            if reverify_failed or new_e + E_SCORE_EPSILON < original_e:
                rolled_back = True
                warnings.append(
                    "correction rolled back: re-verified evidence score "
                    f"{new_e:.6g} < original {original_e:.6g}"
                )
                for verdict in verdicts:
                    if verdict.gate is not GateDecision.PASS:
                        verdict.gate = GateDecision.ROLLED_BACK
            else:
                final_text = corrected_text
                e_score = new_e

        timings["total_ms"] = (time.perf_counter() - t_start) * 1000.0
        return VerifiedResponse(
            original_text=response_text,
            final_text=final_text,
            e_score=e_score,
            verdicts=verdicts,
            corrections=[c for _, c in corrections],
            timings=timings,
            degraded_sources=degraded,
            rolled_back=rolled_back,
            warnings=warnings,
        )

    def reverify(self, corrected_text: str, options: Mapping | None = None) -> VerifiedResponse:
        """One plain verification pass (used after an external correction)."""
        return self.verify(corrected_text, options)

    def source_health(self) -> dict[str, bool]:
        return {source_id: handle.healthy() for source_id, handle in self.sources.items()}


class PipelineHolder:
    """Atomically swappable pipeline reference for config reload."""

    def __init__(self, pipeline: Pipeline):
        self._lock = threading.Lock()
        self._pipeline = pipeline

    @property
    def pipeline(self) -> Pipeline:
        with self._lock:
            return self._pipeline

    def reload(self) -> Pipeline:
        config_path = self.pipeline.config.config_path
        if config_path is None:
            raise ValueError("pipeline was not loaded from a config file")
        fresh = Pipeline.from_config_file(config_path)
        with self._lock:
            self._pipeline = fresh
        return fresh
