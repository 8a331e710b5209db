"""Adaptive correction: fact substitution, hedge insertion, source
attribution. Pure text transformation — replacements splice into the claim
span and never touch surrounding characters; the pipeline re-verifies the
result once and rolls back if the evidence score got worse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from factgate.claims.model import Claim, ClaimValue, DateValue, Span
from factgate.confidence.scoring import ConfidenceBreakdown
from factgate.fusion.pool import ConsistencyReport


class CorrectionStrategy(Enum):
    SUBSTITUTE = "SUBSTITUTE"
    HEDGE = "HEDGE"
    ATTRIBUTE = "ATTRIBUTE"


class NotFlagged(ValueError):
    """select_strategy called on a claim that passed the gate."""


class SpanMismatch(ValueError):
    """Response text changed since the claim was extracted."""


@dataclass(frozen=True)
class CorrectionConfig:
    substitution_threshold: float = 0.6
    cluster_margin: float = 0.05  # functional predicates: values within this of the top
    multi_value_mass: float = 0.2  # multi-valued predicates: per-value mass floor
    hedge_phrase: str = "It is uncertain whether "
    attribution_labels: dict[str, str] = field(default_factory=dict)

    def label_for(self, source_id: str) -> str:
        return self.attribution_labels.get(source_id, source_id)


@dataclass(frozen=True)
class Correction:
    claim_id: str
    strategy: CorrectionStrategy
    original_span: Span
    replacement_text: str
    cited_sources: tuple[str, ...] = ()
    posterior_mass_used: float = 0.0

    def __post_init__(self):
        if not self.replacement_text:
            raise ValueError("replacement_text must be non-empty")
        if self.strategy is CorrectionStrategy.ATTRIBUTE and not self.cited_sources:
            raise ValueError("ATTRIBUTE corrections must cite at least one source")


@dataclass(frozen=True)
class StrategyDecision:
    strategy: CorrectionStrategy
    values: tuple[ClaimValue, ...] = ()
    posterior_mass: float = 0.0


def _substitution_set(
    posterior: dict[ClaimValue, float], multi_valued: bool, config: CorrectionConfig
) -> tuple[list[ClaimValue], float]:
    top = max(posterior.values())
    if multi_valued:
        chosen = [v for v, p in posterior.items() if p >= config.multi_value_mass]
    else:
        chosen = [v for v, p in posterior.items() if top - p < config.cluster_margin]
    mass = sum(posterior[v] for v in chosen)
    chosen.sort(key=lambda v: v.sort_key())
    return chosen, mass


def select_strategy(
    claim: Claim,
    report: ConsistencyReport,
    breakdown: ConfidenceBreakdown,
    config: CorrectionConfig,
    tau_confidence: float,
    multi_valued: bool = False,
) -> StrategyDecision:
    """Pick the correction approach for a flagged claim.

    SUBSTITUTE when the posterior concentrates enough mass on a value set;
    HEDGE when no source had anything; ATTRIBUTE when evidence exists but
    is not decisive. Substituting the claim's own value is pointless, so a
    supported-but-low-confidence claim falls through to ATTRIBUTE.
    """
    if breakdown.combined > tau_confidence and not report.contradiction:
        raise NotFlagged(f"claim {claim.id} passed the gate")
    posterior = report.fused_posterior
    if not posterior:
        return StrategyDecision(CorrectionStrategy.HEDGE)
    values, mass = _substitution_set(posterior, multi_valued, config)
    claim_key = claim.object.merge_key()
    if mass >= config.substitution_threshold and values:
        if all(v.merge_key() == claim_key for v in values):
            return StrategyDecision(CorrectionStrategy.ATTRIBUTE, tuple(values), mass)
        return StrategyDecision(CorrectionStrategy.SUBSTITUTE, tuple(values), mass)
    return StrategyDecision(CorrectionStrategy.ATTRIBUTE, tuple(values), mass)


_TRAILING_PUNCT = re.compile(r"[.!?]+$")


def _render_substitution(
    claim: Claim, values: Sequence[ClaimValue], labels: dict[ClaimValue, str]
) -> tuple[Span, str]:
    """Replacement span and text for a substitution.

    With per-value labels and a theme slot ("X published Y in Z"), the whole
    "Y in Z" segment is rewritten as "label1 in v1 and label2 in v2"; without
    labels only the object slot changes.
    """
    if claim.object_span is None:
        raise SpanMismatch(f"claim {claim.id} carries no object span")
    by_key = {v.merge_key(): label for v, label in labels.items()}
    all_dated_and_labeled = claim.theme_span is not None and all(
        isinstance(v, DateValue) and v.merge_key() in by_key for v in values
    )
    if all_dated_and_labeled:
        span = Span(claim.theme_span.start, claim.object_span.end)
        text = " and ".join(f"{by_key[v.merge_key()]} in {v.render()}" for v in values)
        return span, text
    return claim.object_span, " and ".join(v.render() for v in values)


def build_correction(
    claim: Claim,
    report: ConsistencyReport,
    decision: StrategyDecision,
    config: CorrectionConfig,
) -> Correction:
    cited = tuple(report.contributing_sources)
    if decision.strategy is CorrectionStrategy.SUBSTITUTE:
        span, text = _render_substitution(claim, decision.values, report.value_labels)
        return Correction(
            claim_id=claim.id,
            strategy=CorrectionStrategy.SUBSTITUTE,
            original_span=span,
            replacement_text=text,
            cited_sources=cited,
            posterior_mass_used=decision.posterior_mass,
        )
    if decision.strategy is CorrectionStrategy.HEDGE:
        head = claim.raw_text[:1].lower() + claim.raw_text[1:]
        return Correction(
            claim_id=claim.id,
            strategy=CorrectionStrategy.HEDGE,
            original_span=claim.span,
            replacement_text=config.hedge_phrase + head,
            cited_sources=cited,
        )
    labels = ", ".join(config.label_for(s) for s in report.contributing_sources)
    suffix = f" (according to {labels})"
    match = _TRAILING_PUNCT.search(claim.raw_text)
    if match:
        text = claim.raw_text[: match.start()] + suffix + claim.raw_text[match.start() :]
    else:
        text = claim.raw_text + suffix
    return Correction(
        claim_id=claim.id,
        strategy=CorrectionStrategy.ATTRIBUTE,
        original_span=claim.span,
        replacement_text=text,
        cited_sources=cited,
        posterior_mass_used=decision.posterior_mass,
    )


def apply_correction(response_text: str, claim: Claim, correction: Correction) -> str:
    """Splice one correction into the text; bytes outside the replaced span
    are untouched."""
    if claim.span.slice(response_text) != claim.raw_text:
        raise SpanMismatch(
            f"claim {claim.id}: span no longer matches its text "
            f"({claim.span.slice(response_text)!r} != {claim.raw_text!r})"
        )
    span = correction.original_span
    return response_text[: span.start] + correction.replacement_text + response_text[span.end :]


def apply_corrections(
    response_text: str, corrections: Sequence[tuple[Claim, Correction]]
) -> str:
    """Apply right-to-left by span so earlier offsets stay valid. At most
    one correction per claim."""
    seen: set[str] = set()
    for claim, correction in corrections:
        if correction.claim_id in seen:
            raise ValueError(f"duplicate correction for claim {correction.claim_id}")
        seen.add(correction.claim_id)
    ordered = sorted(corrections, key=lambda pair: -pair[1].original_span.start)
    text = response_text
    for claim, correction in ordered:
        if claim.span.slice(response_text) != claim.raw_text:
            raise SpanMismatch(f"claim {claim.id}: stale span")
        span = correction.original_span
        text = text[: span.start] + correction.replacement_text + text[span.end :]
    return text
