"""Generic HTTP search adapter.

One GET per claim: ``<endpoint>?q=<claim text>&k=<max_results>``. The
response is a JSON array of hits ``{snippet, value, value_type, authority,
published, citations}`` which aggregate into a single Evidence exactly like
corpus hits (authority-weighted). Timeouts come from the source profile.
"""

from __future__ import annotations

import datetime as dt
import time

import httpx

from factgate.claims.linking import AliasTable, link_entity
from factgate.claims.model import (
    Claim,
    ClaimValue,
    DateValue,
    EntityRef,
    EntityValue,
    NumberValue,
    TextValue,
)
from factgate.sources.base import (
    DEFAULT_STANCE_MARGIN,
    Evidence,
    SourceProfile,
    SourceTimeout,
    SourceUnavailable,
    aggregate_hits,
    build_evidence,
)


def parse_hit_value(value, value_type: str, alias_table: AliasTable | None = None) -> ClaimValue:
    kind = (value_type or "text").strip().lower()
    if kind == "date":
        return DateValue(int(value))
    if kind == "number":
        if isinstance(value, str):
            parts = value.split(None, 1)
            return NumberValue(float(parts[0]), parts[1] if len(parts) == 2 else None)
        return NumberValue(float(value))
    if kind == "entity":
        ref = link_entity(str(value), alias_table)
        if not ref.linked:
            ref = EntityRef.unlinked(str(value))
        return EntityValue(ref)
    return TextValue(str(value))


class WebSearchSource:
    """SourceHandle over a remote search endpoint."""

    def __init__(
        self,
        profile: SourceProfile,
        endpoint: str,
        alias_table: AliasTable | None = None,
        multi_valued_predicates: set[str] | None = None,
        stance_margin: float = DEFAULT_STANCE_MARGIN,
    ):
        self.profile = profile
        self.endpoint = endpoint
        self.alias_table = alias_table
        self.multi_valued = multi_valued_predicates or set()
        self.stance_margin = stance_margin

    def healthy(self) -> bool:
        try:
            response = httpx.get(
                self.endpoint, params={"q": "", "k": 1}, timeout=self.profile.timeout_ms / 1000.0
            )
            return response.status_code < 500
        except httpx.HTTPError:
            return False

    def query(self, claim: Claim) -> Evidence:
        started = time.perf_counter()
        try:
            response = httpx.get(
                self.endpoint,
                params={"q": claim.raw_text, "k": self.profile.max_results},
                timeout=self.profile.timeout_ms / 1000.0,
            )
        except httpx.TimeoutException as exc:
            raise SourceTimeout(f"{self.profile.source_id}: {exc}") from exc
        except httpx.HTTPError as exc:
            raise SourceUnavailable(f"{self.profile.source_id}: {exc}") from exc
        latency_ms = (time.perf_counter() - started) * 1000.0
        if response.status_code != 200:
            raise SourceUnavailable(f"{self.profile.source_id}: HTTP {response.status_code}")
        try:
            hits = response.json()
        except ValueError as exc:
            raise SourceUnavailable(f"{self.profile.source_id}: malformed body") from exc
        if not isinstance(hits, list):
            raise SourceUnavailable(f"{self.profile.source_id}: expected JSON array")

        hits = hits[: self.profile.max_results]
        if not hits:
            return Evidence.insufficient(
                self.profile.source_id, claim.id, self.profile.base_reliability, latency_ms
            )
        try:
            parsed = [
                (
                    parse_hit_value(h["value"], h.get("value_type", "text"), self.alias_table),
                    float(h.get("authority", 0.5)),
                    h.get("snippet", ""),
                    h.get("published"),
                    int(h.get("citations", 0)),
                )
                for h in hits
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise SourceUnavailable(f"{self.profile.source_id}: malformed hit: {exc}") from exc

        distribution = aggregate_hits((value, authority) for value, authority, *_ in parsed)
        authority = sum(a for _, a, *_ in parsed) / len(parsed)
        published_dates = [dt.date.fromisoformat(p) for *_, p, _ in parsed if p]
        recency = max(published_dates, default=None)
        citations = max(c for *_, c in parsed)
        snippet = " ".join(s for _, _, s, _, _ in parsed if s)
        return build_evidence(
            self.profile,
            claim,
            distribution,
            authority=authority,
            recency=recency,
            citation_count=citations,
            latency_ms=latency_ms,
            snippet=snippet,
            stance_margin=self.stance_margin,
            multi_valued=claim.predicate in self.multi_valued,
        )
