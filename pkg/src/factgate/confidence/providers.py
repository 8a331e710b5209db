"""Intrinsic-confidence providers.

Model internals (token probabilities, attention patterns) are not available
to the middleware, so intrinsic confidence is injectable. Built-ins:

* ConstantProvider(value)        — fixed prior for every claim
* SuppliedConfidenceProvider     — reads a per-claim value from the request
* SampleAgreementProvider        — agreement across alternative generations

A provider failure falls back to the uninformative 0.5 so verification can
proceed; the pipeline records the fallback.
"""

from __future__ import annotations

import logging
from typing import Mapping, Protocol, Sequence

from factgate.claims.extractor import ExtractorConfig, extract_claims
from factgate.claims.model import Claim, normalize_surface

log = logging.getLogger(__name__)

UNINFORMATIVE = 0.5


class ProviderUnavailable(Exception):
    pass


class IntrinsicProvider(Protocol):
    def score(self, claim: Claim, request_context: Mapping | None = None) -> float: ...


class ConstantProvider:
    def __init__(self, value: float):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"constant intrinsic confidence out of [0,1]: {value}")
        self.value = value

    def score(self, claim: Claim, request_context: Mapping | None = None) -> float:
        return self.value


class SuppliedConfidenceProvider:
    """Reads `intrinsic_confidences` from the request context: a map keyed
    by claim raw text, or by the claim's zero-based position (as a string)
    in span order. The position index travels in the request context under
    `claim_index`, so the provider itself stays stateless."""

    def score(self, claim: Claim, request_context: Mapping | None = None) -> float:
        context = request_context or {}
        supplied = context.get("intrinsic_confidences")
        if not isinstance(supplied, Mapping):
            raise ProviderUnavailable("request carries no intrinsic_confidences map")
        value = supplied.get(claim.raw_text)
        if value is None:
            claim_index = context.get("claim_index") or {}
            position = claim_index.get(claim.id)
            if position is not None:
                value = supplied.get(str(position))
        if value is None:
            raise ProviderUnavailable(f"no supplied confidence for claim {claim.id}")
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise ProviderUnavailable(f"supplied confidence out of [0,1]: {value}")
        return value


def _subjects_match(a, b) -> bool:
    # linking state may differ between the response and alternative samples
    if a.linked and b.linked:
        return a.canonical_id == b.canonical_id
    return normalize_surface(a.surface_form) == normalize_surface(b.surface_form)


class SampleAgreementProvider:
    """Fraction of K alternative responses whose claim for the same
    (subject, predicate) agrees on the object value; 0.5 when K = 0."""

    def __init__(self, alternatives: Sequence[str], extractor_config: ExtractorConfig | None = None):
        self.alternatives = list(alternatives)
        config = extractor_config or ExtractorConfig.default()
        self._alt_claims = [extract_claims(text, config) for text in self.alternatives]

    def score(self, claim: Claim, request_context: Mapping | None = None) -> float:
        if not self.alternatives:
            return UNINFORMATIVE
        object_key = claim.object.merge_key()
        agreeing = 0
        for alt_claims in self._alt_claims:
            for alt in alt_claims:
                if alt.predicate == claim.predicate and _subjects_match(alt.subject, claim.subject):
                    if alt.object.merge_key() == object_key:
                        agreeing += 1
                    break
        return agreeing / len(self.alternatives)


def safe_intrinsic(
    provider: IntrinsicProvider, claim: Claim, request_context: Mapping | None = None
) -> tuple[float, bool]:
    """Provider value, or the 0.5 fallback with a flag when it failed."""
    try:
        return provider.score(claim, request_context), False
    except ProviderUnavailable as exc:
        log.warning("intrinsic provider unavailable for %s: %s", claim.id, exc)
        return UNINFORMATIVE, True
