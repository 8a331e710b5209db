"""Cross-source evidence fusion.

Per claim: a linear opinion pool over the responding sources' value
distributions, a reliability-weighted consistency score, and an evidence
strength aggregate from authority / recency / citation signals. The
response-level evidence score is the claim-mean of consistency x strength.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from factgate.claims.model import Claim, ClaimValue
from factgate.sources.base import Evidence, Stance

NEUTRAL_CONSISTENCY = 0.5  # no evidence neither vindicates nor condemns


class NegativeWeightError(ValueError):
    pass


@dataclass(frozen=True)
class FusionConfig:
    """Fusion knobs; all values overridable from the pipeline config file."""

    tau_consistency: float = 0.5
    authority_coeff: float = 0.5
    recency_coeff: float = 0.3
    citation_coeff: float = 0.2
    half_life_days: float = 365.0
    as_of: dt.date | None = None  # reference date for recency; None = today
    citation_ceiling: int | None = None  # None = max citations within the evidence list
    stance_margin: float = 0.05

    def __post_init__(self):
        coeffs = (self.authority_coeff, self.recency_coeff, self.citation_coeff)
        if any(c < 0 for c in coeffs):
            raise ValueError("strength coefficients must be non-negative")
        if abs(sum(coeffs) - 1.0) > 1e-9:
            raise ValueError(f"strength coefficients must sum to 1, got {sum(coeffs)}")
        if not 0.0 <= self.tau_consistency <= 1.0:
            raise ValueError("tau_consistency must be in [0,1]")


@dataclass
class ConsistencyReport:
    claim_id: str
    consistency: float
    strength: float
    fused_posterior: dict[ClaimValue, float]
    contradiction: bool
    contributing_sources: list[str]
    value_labels: dict[ClaimValue, str] = field(default_factory=dict)


def fuse_posterior(
    evidence_list: Sequence[Evidence], weights: Mapping[str, float]
) -> dict[ClaimValue, float]:
    """Linear opinion pool over responding sources.

    Weights of responding sources are renormalized to sum to 1, so scaling
    all weights by a constant leaves the posterior unchanged. All sources
    INSUFFICIENT -> empty mapping.
    """
    responders = [e for e in evidence_list if e.responded]
    if not responders:
        return {}
    for e in responders:
        if e.source_id not in weights:
            raise KeyError(f"no fusion weight for responding source {e.source_id!r}")
        if weights[e.source_id] < 0:
            raise NegativeWeightError(f"negative weight for {e.source_id!r}")
    total = sum(weights[e.source_id] for e in responders)
    if total > 0:
        share = {e.source_id: weights[e.source_id] / total for e in responders}
    else:  # all-zero weights: fall back to an unweighted pool
        share = {e.source_id: 1.0 / len(responders) for e in responders}

    # Deterministic representative per merge key: highest-share source first.
    responders = sorted(responders, key=lambda e: (-share[e.source_id], e.source_id))
    mass: dict[tuple, float] = {}
    reps: dict[tuple, ClaimValue] = {}
    for evidence in responders:
        w = share[evidence.source_id]
        for value in sorted(evidence.value_distribution, key=lambda v: v.sort_key()):
            key = value.merge_key()
            reps.setdefault(key, value)
            mass[key] = mass.get(key, 0.0) + w * evidence.value_distribution[value]
    ordered = sorted(mass.items(), key=lambda kv: (-kv[1], reps[kv[0]].sort_key()))
    return {reps[key]: m for key, m in ordered}


def merge_value_labels(
    evidence_list: Sequence[Evidence], weights: Mapping[str, float] | None = None
) -> dict[ClaimValue, str]:
    """Collect per-value display labels; on conflict the highest-weight
    source wins (ties by source id)."""
    weights = weights or {}
    ordered = sorted(
        evidence_list, key=lambda e: (-weights.get(e.source_id, 0.0), e.source_id)
    )
    labels: dict[tuple, tuple[ClaimValue, str]] = {}
    for evidence in ordered:
        for value, label in evidence.value_labels.items():
            labels.setdefault(value.merge_key(), (value, label))
    return {value: label for value, label in labels.values()}


def check_consistency(evidence_list: Sequence[Evidence]) -> float:
    """Reliability-weighted fraction of responding evidence that supports
    the claim; neutral 0.5 when every source is INSUFFICIENT."""
    responders = [e for e in evidence_list if e.responded]
    if not responders:
        return NEUTRAL_CONSISTENCY
    total_reliability = sum(e.reliability for e in responders)
    if total_reliability <= 0.0:
        supporting = sum(1 for e in responders if e.stance is Stance.SUPPORTS)
        return supporting / len(responders)
    supporting_mass = sum(e.reliability for e in responders if e.stance is Stance.SUPPORTS)
    return supporting_mass / total_reliability


def recency_score(recency: dt.date | None, as_of: dt.date | None, half_life_days: float) -> float:
    """exp(-age/half_life); undated evidence (curated KG facts) scores 1."""
    if recency is None:
        return 1.0
    reference = as_of if as_of is not None else dt.date.today()
    age_days = max((reference - recency).days, 0)
    return math.exp(-age_days / half_life_days)


def citation_norm(citations: int, ceiling: int) -> float:
    if ceiling <= 0:
        return 0.0
    return math.log1p(citations) / math.log1p(ceiling)


def quality_components(
    evidence: Evidence, config: FusionConfig, ceiling: int
) -> tuple[float, float, float]:
    return (
        evidence.authority,
        recency_score(evidence.recency, config.as_of, config.half_life_days),
        citation_norm(evidence.citation_count, ceiling),
    )


def strength_from_components(
    components: Sequence[tuple[float, float, float]], config: FusionConfig
) -> float:
    if not components:
        return 0.0
    per_item = [
        config.authority_coeff * a + config.recency_coeff * r + config.citation_coeff * c
        for a, r, c in components
    ]
    return sum(per_item) / len(per_item)


def weight_evidence(evidence_list: Sequence[Evidence], config: FusionConfig) -> float:
    """Mean evidence quality over responding sources; 0 when none responded."""
    responders = [e for e in evidence_list if e.responded]
    if not responders:
        return 0.0
    ceiling = config.citation_ceiling
    if ceiling is None:
        ceiling = max(e.citation_count for e in responders)
    return strength_from_components(
        [quality_components(e, config, ceiling) for e in responders], config
    )


def build_report(
    claim: Claim,
    evidence_list: Sequence[Evidence],
    weights: Mapping[str, float],
    config: FusionConfig,
) -> ConsistencyReport:
    consistency = check_consistency(evidence_list)
    return ConsistencyReport(
        claim_id=claim.id,
        consistency=consistency,
        strength=weight_evidence(evidence_list, config),
        fused_posterior=fuse_posterior(evidence_list, weights),
        contradiction=consistency < config.tau_consistency,
        contributing_sources=sorted(e.source_id for e in evidence_list if e.responded),
        value_labels=merge_value_labels(evidence_list, weights),
    )


def validate_response(
    claims: Sequence[Claim],
    evidence_by_claim: Mapping[str, Sequence[Evidence]],
    weights: Mapping[str, float],
    config: FusionConfig,
) -> tuple[float, list[ConsistencyReport]]:
    """Response-level evidence score plus per-claim reports.

    E_s is the mean of consistency x strength over claims; claim-free text
    scores 1.0 (vacuously verified) with no reports.
    """
    if not claims:
        return 1.0, []
    reports = [
        build_report(claim, evidence_by_claim.get(claim.id, ()), weights, config)
        for claim in claims
    ]
    e_score = sum(r.consistency * r.strength for r in reports) / len(reports)
    return e_score, reports
