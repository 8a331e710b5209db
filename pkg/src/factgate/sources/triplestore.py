"""In-process temporal triple store and the knowledge-graph source.

Triples are indexed by (subject_id, predicate) for sub-millisecond lookup;
validity intervals filter time-sensitive facts. The store is immutable
after load, so concurrent queries need no locking.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from factgate.claims.model import (
    Claim,
    ClaimValue,
    DateValue,
    EntityKind,
    EntityRef,
    EntityValue,
    NumberValue,
    TextValue,
)
from factgate.sources.base import (
    DEFAULT_STANCE_MARGIN,
    Evidence,
    SourceProfile,
    aggregate_hits,
    build_evidence,
)


@dataclass(frozen=True)
class Triple:
    """One structured fact with an optional validity interval.

    `label` is a human-readable tag for the object value (e.g. the work a
    publication date refers to); corrections use it to render substitutions.
    """

    subject_id: str
    predicate: str
    object: ClaimValue
    valid_from: int | None = None
    valid_to: int | None = None
    asserted_confidence: float = 1.0
    label: str | None = None

    def __post_init__(self):
        if self.valid_from is not None and self.valid_to is not None:
            if self.valid_from > self.valid_to:
                raise ValueError(f"valid_from {self.valid_from} > valid_to {self.valid_to}")
        if not 0.0 <= self.asserted_confidence <= 1.0:
            raise ValueError(f"asserted_confidence out of [0,1]: {self.asserted_confidence}")

    def valid_at(self, year: int | None) -> bool:
        if year is None:
            return True
        if self.valid_from is not None and year < self.valid_from:
            return False
        if self.valid_to is not None and year > self.valid_to:
            return False
        return True


def _parse_object(object_type: str, object_value: str, label: str | None) -> ClaimValue:
    kind = object_type.strip().lower()
    if kind == "date":
        return DateValue(int(object_value))
    if kind == "number":
        parts = object_value.split(None, 1)
        unit = parts[1] if len(parts) == 2 else None
        return NumberValue(float(parts[0]), unit)
    if kind == "entity":
        return EntityValue(EntityRef(object_value, label or object_value, EntityKind.OTHER, 1.0))
    if kind == "text":
        return TextValue(object_value)
    raise ValueError(f"unknown object type: {object_type!r}")


class TripleStore:
    """Hash index on (subject_id, normalized predicate)."""

    def __init__(self, triples: list[Triple] | None = None):
        self._index: dict[tuple[str, str], list[Triple]] = {}
        self._count = 0
        for triple in triples or []:
            self.add(triple)

    def add(self, triple: Triple) -> None:
        key = (triple.subject_id, triple.predicate.strip().lower())
        self._index.setdefault(key, []).append(triple)
        self._count += 1

    def __len__(self) -> int:
        return self._count

    def all_triples(self) -> list[Triple]:
        return [t for bucket in self._index.values() for t in bucket]

    def lookup(self, subject_id: str, predicate: str, as_of: int | None = None) -> list[Triple]:
        """All triples for subject+predicate whose validity covers as_of.

        Unknown subjects yield an empty list, not an error.
        """
        bucket = self._index.get((subject_id, predicate.strip().lower()), [])
        hits = [t for t in bucket if t.valid_at(as_of)]
        hits.sort(key=lambda t: (t.object.sort_key(), t.valid_from if t.valid_from is not None else -(10**9)))
        return hits

    @classmethod
    def load(cls, path: str | Path) -> "TripleStore":
        """TSV columns: subject_id, predicate, object_type, object_value,
        valid_from, valid_to, confidence[, label]. Empty interval fields
        mean an open interval."""
        store = cls()
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) not in (7, 8):
                raise ValueError(f"{path}:{lineno}: expected 7 or 8 tab-separated fields, got {len(parts)}")
            subject_id, predicate, obj_type, obj_value = parts[0], parts[1], parts[2], parts[3]
            valid_from = int(parts[4]) if parts[4].strip() else None
            valid_to = int(parts[5]) if parts[5].strip() else None
            confidence = float(parts[6]) if parts[6].strip() else 1.0
            label = parts[7].strip() if len(parts) == 8 and parts[7].strip() else None
            store.add(
                Triple(
                    subject_id=subject_id.strip(),
                    predicate=predicate.strip().lower(),
                    object=_parse_object(obj_type, obj_value.strip(), label),
                    valid_from=valid_from,
                    valid_to=valid_to,
                    asserted_confidence=confidence,
                    label=label,
                )
            )
        return store


class KnowledgeGraphSource:
    """Evidence adapter over a TripleStore."""

    def __init__(
        self,
        profile: SourceProfile,
        store: TripleStore,
        multi_valued_predicates: set[str] | None = None,
        stance_margin: float = DEFAULT_STANCE_MARGIN,
    ):
        self.profile = profile
        self.store = store
        self.multi_valued = multi_valued_predicates or set()
        self.stance_margin = stance_margin

    def healthy(self) -> bool:
        return True

    def query(self, claim: Claim) -> Evidence:
        started = time.perf_counter()
        if not claim.subject.linked:
            return Evidence.insufficient(
                self.profile.source_id, claim.id, self.profile.base_reliability,
                (time.perf_counter() - started) * 1000.0,
            )
        as_of = claim.temporal_qualifier[0] if claim.temporal_qualifier else None
        triples = self.store.lookup(claim.subject.canonical_id, claim.predicate, as_of)
        latency_ms = (time.perf_counter() - started) * 1000.0
        if not triples:
            return Evidence.insufficient(
                self.profile.source_id, claim.id, self.profile.base_reliability, latency_ms
            )
        distribution = aggregate_hits((t.object, t.asserted_confidence) for t in triples)
        labels = {}
        for t in triples:
            if t.label:
                labels.setdefault(t.object, t.label)
        authority = sum(t.asserted_confidence for t in triples) / len(triples)
        snippet = " ".join(self._render_triple(claim, t) for t in triples)
        return build_evidence(
            self.profile,
            claim,
            distribution,
            authority=authority,
            recency=None,
            citation_count=0,
            latency_ms=latency_ms,
            snippet=snippet,
            value_labels=labels,
            stance_margin=self.stance_margin,
            multi_valued=claim.predicate in self.multi_valued,
        )

    @staticmethod
    def _render_triple(claim: Claim, triple: Triple) -> str:
        subject = claim.subject.surface_form
        if triple.label and isinstance(triple.object, DateValue):
            return f"{subject} {claim.predicate} {triple.label} in {triple.object.render()}."
        return f"{subject} {claim.predicate} {triple.object.render()}."
