"""Confidence ensemble: external evidence score, semantic coherence, and
the weighted combination gate input."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from factgate.claims.model import Claim
from factgate.fusion.pool import ConsistencyReport
from factgate.sources.base import Evidence
from factgate.sources.corpus import tokenize

SIMPLEX_TOLERANCE = 1e-9


class WeightsOffSimplex(ValueError):
    pass


@dataclass(frozen=True)
class ConfidenceBreakdown:
    intrinsic: float
    external: float
    coherence: float
    combined: float
    weights_used: tuple[float, float, float]
    intrinsic_fallback: bool = False


def external_confidence(report: ConsistencyReport) -> float:
    """consistency x strength, clipped to [0,1] (the per-claim term that
    the evidence score accumulates)."""
    return min(1.0, max(0.0, report.consistency * report.strength))


def coherence_score(claim: Claim, evidence_list: Sequence[Evidence]) -> float:
    """Cosine similarity between term-frequency vectors of the claim text
    and the concatenated evidence snippets (case-folded, stop words
    removed). No snippets -> uninformative 0.5."""
    snippets = [e.snippet for e in evidence_list if e.snippet]
    if not snippets:
        return 0.5
    claim_tf = Counter(tokenize(claim.raw_text))
    snippet_tf = Counter(tokenize(" ".join(snippets)))
    if not claim_tf or not snippet_tf:
        return 0.0
    dot = sum(count * snippet_tf.get(term, 0) for term, count in claim_tf.items())
    norm_a = math.sqrt(sum(c * c for c in claim_tf.values()))
    norm_b = math.sqrt(sum(c * c for c in snippet_tf.values()))
    return dot / (norm_a * norm_b)


def validate_simplex(weights: tuple[float, float, float]) -> None:
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > SIMPLEX_TOLERANCE:
        raise WeightsOffSimplex(f"weights must be a probability simplex point: {weights}")


def combine_confidence(
    intrinsic: float,
    external: float,
    coherence: float,
    weights: tuple[float, float, float],
) -> float:
    """Weighted ensemble of the three confidence components."""
    validate_simplex(weights)
    alpha, beta, gamma = weights
    combined = alpha * intrinsic + beta * external + gamma * coherence
    return min(1.0, max(0.0, combined))


def build_breakdown(
    intrinsic: float,
    report: ConsistencyReport,
    claim: Claim,
    evidence_list: Sequence[Evidence],
    weights: tuple[float, float, float],
    intrinsic_fallback: bool = False,
) -> ConfidenceBreakdown:
    external = external_confidence(report)
    coherence = coherence_score(claim, evidence_list)
    return ConfidenceBreakdown(
        intrinsic=intrinsic,
        external=external,
        coherence=coherence,
        combined=combine_confidence(intrinsic, external, coherence, weights),
        weights_used=weights,
        intrinsic_fallback=intrinsic_fallback,
    )
