"""Source profiles, evidence, stance decisions, and hit aggregation.

Every knowledge source returns exactly one Evidence per claim: the source
internally aggregates its hits into a single value distribution plus a
stance toward the claim's asserted value. A timed-out or empty source is
INSUFFICIENT and carries no value mass.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Protocol, runtime_checkable

from factgate.claims.model import Claim, ClaimValue

DISTRIBUTION_TOLERANCE = 1e-9

# A claim value within this posterior mass of the argmax but not itself an
# argmax is too close to call: the source abstains (INSUFFICIENT).
DEFAULT_STANCE_MARGIN = 0.05

# For predicates that admit several true objects ("published", "won"), any
# value holding at least this share of mass counts as supported even when it
# is not the argmax.
MULTI_VALUE_SUPPORT_FLOOR = 0.2


class SourceKind(Enum):
    KNOWLEDGE_GRAPH = "knowledge_graph"
    WEB_SEARCH = "web_search"
    DOMAIN_DB = "domain_db"


class Stance(Enum):
    SUPPORTS = "SUPPORTS"
    REFUTES = "REFUTES"
    INSUFFICIENT = "INSUFFICIENT"


class SourceTimeout(Exception):
    """Source failed to answer within its timeout."""


class SourceUnavailable(Exception):
    """Source connection or load failure; skip and renormalize weights."""


@dataclass(frozen=True)
class SourceProfile:
    source_id: str
    kind: SourceKind
    base_reliability: float
    fusion_weight: float
    timeout_ms: float = 800.0
    max_results: int = 10

    def __post_init__(self):
        if not 0.0 <= self.base_reliability <= 1.0:
            raise ValueError(f"base_reliability out of [0,1]: {self.base_reliability}")
        if self.fusion_weight < 0.0:
            raise ValueError(f"fusion_weight must be >= 0: {self.fusion_weight}")
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.max_results < 1:
            raise ValueError("max_results must be >= 1")


@dataclass
class Evidence:
    """One source's finding about one claim."""

    source_id: str
    claim_id: str
    stance: Stance
    value_distribution: dict[ClaimValue, float]
    authority: float = 0.0
    recency: dt.date | None = None
    citation_count: int = 0
    reliability: float = 0.0
    latency_ms: float = 0.0
    snippet: str = ""
    value_labels: dict[ClaimValue, str] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.authority <= 1.0:
            raise ValueError(f"authority out of [0,1]: {self.authority}")
        if not 0.0 <= self.reliability <= 1.0:
            raise ValueError(f"reliability out of [0,1]: {self.reliability}")
        if self.citation_count < 0:
            raise ValueError("citation_count must be non-negative")
        if self.value_distribution:
            total = sum(self.value_distribution.values())
            if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
                raise ValueError(f"value distribution sums to {total}, expected 1")
            if self.stance is Stance.INSUFFICIENT:
                raise ValueError("INSUFFICIENT evidence must carry no value mass")
        elif self.stance is not Stance.INSUFFICIENT:
            raise ValueError(f"empty distribution requires INSUFFICIENT, got {self.stance}")

    @property
    def responded(self) -> bool:
        return self.stance is not Stance.INSUFFICIENT

    @classmethod
    def insufficient(
        cls, source_id: str, claim_id: str, reliability: float = 0.0, latency_ms: float = 0.0
    ) -> "Evidence":
        return cls(source_id, claim_id, Stance.INSUFFICIENT, {}, reliability=reliability, latency_ms=latency_ms)


def decide_stance(
    claim_value: ClaimValue,
    distribution: Mapping[ClaimValue, float],
    margin: float = DEFAULT_STANCE_MARGIN,
    multi_valued: bool = False,
    support_floor: float = MULTI_VALUE_SUPPORT_FLOOR,
) -> Stance:
    """Stance of a source-local distribution toward the claim's value.

    SUPPORTS when the claim value holds the (possibly tied) maximum mass, or,
    for multi-valued predicates, at least the support floor. REFUTES when a
    different value beats it by at least `margin`. A near miss inside the
    margin is INSUFFICIENT: the source abstains rather than call it.
    """
    if not distribution:
        return Stance.INSUFFICIENT
    key = claim_value.merge_key()
    claim_mass = sum(p for v, p in distribution.items() if v.merge_key() == key)
    top = max(distribution.values())
    if claim_mass >= top - 1e-12:
        return Stance.SUPPORTS
    if multi_valued and claim_mass >= support_floor:
        return Stance.SUPPORTS
    if top - claim_mass >= margin:
        return Stance.REFUTES
    return Stance.INSUFFICIENT


def aggregate_hits(
    hits: Iterable[tuple[ClaimValue, float]],
    weight_by_authority: bool = True,
) -> dict[ClaimValue, float]:
    """Collapse (value, authority) hits into a normalized distribution.

    Values unify by merge key; the representative is the first one seen.
    With weight_by_authority=False every hit counts 1 (the raw count stage).
    """
    mass: dict[tuple, float] = {}
    reps: dict[tuple, ClaimValue] = {}
    for value, authority in hits:
        key = value.merge_key()
        reps.setdefault(key, value)
        mass[key] = mass.get(key, 0.0) + (authority if weight_by_authority else 1.0)
    total = sum(mass.values())
    if total <= 0.0:
        return {}
    ordered = sorted(mass.items(), key=lambda kv: (-kv[1], repr(kv[0])))
    return {reps[key]: m / total for key, m in ordered}


def build_evidence(
    profile: SourceProfile,
    claim: Claim,
    distribution: dict[ClaimValue, float],
    *,
    authority: float,
    recency: dt.date | None,
    citation_count: int,
    latency_ms: float,
    snippet: str,
    value_labels: dict[ClaimValue, str] | None = None,
    stance_margin: float = DEFAULT_STANCE_MARGIN,
    multi_valued: bool = False,
) -> Evidence:
    """Apply the stance rule and assemble Evidence; an abstaining stance
    drops the distribution so the INSUFFICIENT invariant holds."""
    stance = decide_stance(claim.object, distribution, stance_margin, multi_valued)
    if stance is Stance.INSUFFICIENT:
        return Evidence.insufficient(
            profile.source_id, claim.id, reliability=profile.base_reliability, latency_ms=latency_ms
        )
    return Evidence(
        source_id=profile.source_id,
        claim_id=claim.id,
        stance=stance,
        value_distribution=distribution,
        authority=authority,
        recency=recency,
        citation_count=citation_count,
        reliability=profile.base_reliability,
        latency_ms=latency_ms,
        snippet=snippet,
        value_labels=value_labels or {},
    )


@runtime_checkable
class SourceHandle(Protocol):
    """Uniform interface the pipeline fans out to. Implementations must
    tolerate concurrent query() calls."""

    profile: SourceProfile

    def query(self, claim: Claim) -> Evidence: ...

    def healthy(self) -> bool: ...
