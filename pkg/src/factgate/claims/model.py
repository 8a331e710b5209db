"""Claim data model: entities, typed claim values, and the claim triple.

A claim is one verifiable assertion extracted from response text:
subject entity, normalized predicate, typed object value, optional temporal
qualifier, and the exact character span it came from. Values are a small
tagged union (date / number / entity / text) so that evidence distributions
can be keyed and merged across heterogeneous sources.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum


class EntityKind(Enum):
    PERSON = "PERSON"
    ORG = "ORG"
    PLACE = "PLACE"
    WORK = "WORK"
    THEORY = "THEORY"
    OTHER = "OTHER"


_NORM_STRIP = re.compile(r"[^\w\s]")
_WS = re.compile(r"\s+")


def normalize_surface(text: str) -> str:
    """Case-fold, strip punctuation, collapse whitespace."""
    return _WS.sub(" ", _NORM_STRIP.sub("", text.casefold())).strip()


@dataclass(frozen=True)
class EntityRef:
    """Reference to a (possibly unlinked) entity.

    canonical_id is empty exactly when link_score is 0 (unlinked).
    """

    canonical_id: str
    surface_form: str
    kind: EntityKind = EntityKind.OTHER
    link_score: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.link_score <= 1.0:
            raise ValueError(f"link_score out of [0,1]: {self.link_score}")
        if (self.canonical_id == "") != (self.link_score == 0.0):
            raise ValueError(
                "canonical_id must be empty iff link_score is 0 "
                f"(got id={self.canonical_id!r}, score={self.link_score})"
            )

    @property
    def linked(self) -> bool:
        return self.canonical_id != ""

    def merge_key(self) -> str:
        """Key under which this entity unifies with entities from other sources."""
        return self.canonical_id if self.linked else normalize_surface(self.surface_form)

    @staticmethod
    def unlinked(surface_form: str, kind: EntityKind = EntityKind.OTHER) -> "EntityRef":
        return EntityRef("", surface_form, kind, 0.0)


class ClaimValue:
    """Base of the value tagged union. Subclasses are frozen and hashable."""

    def merge_key(self) -> tuple:
        """Canonical identity used to unify equal values across sources."""
        raise NotImplementedError

    def sort_key(self) -> tuple:
        """Deterministic total order (used for stable output and rendering)."""
        raise NotImplementedError

    def render(self) -> str:
        """Human-readable form used when splicing corrections into text."""
        raise NotImplementedError


@dataclass(frozen=True)
class DateValue(ClaimValue):
    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self):
        if not -9999 <= self.year <= 9999:
            raise ValueError(f"year out of range: {self.year}")

    def merge_key(self) -> tuple:
        # Year-level identity: sources and the extractor both emit year-only dates.
        return ("date", self.year)

    def sort_key(self) -> tuple:
        return (0, self.year, self.month or 0, self.day or 0)

    def render(self) -> str:
        return str(self.year)


@dataclass(frozen=True)
class NumberValue(ClaimValue):
    value: float
    unit: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"number must be finite: {self.value}")

    def merge_key(self) -> tuple:
        unit = normalize_surface(self.unit) if self.unit else ""
        return ("num", float(self.value), unit)

    def sort_key(self) -> tuple:
        return (1, self.value, self.unit or "")

    def render(self) -> str:
        if float(self.value).is_integer():
            text = str(int(self.value))
        else:
            text = repr(float(self.value))
        return f"{text} {self.unit}" if self.unit else text


@dataclass(frozen=True)
class EntityValue(ClaimValue):
    entity: EntityRef

    def merge_key(self) -> tuple:
        return ("ent", self.entity.merge_key())

    def sort_key(self) -> tuple:
        return (2, self.entity.merge_key())

    def render(self) -> str:
        return self.entity.surface_form


@dataclass(frozen=True)
class TextValue(ClaimValue):
    text: str

    def merge_key(self) -> tuple:
        return ("text", normalize_surface(self.text))

    def sort_key(self) -> tuple:
        return (3, normalize_surface(self.text))

    def render(self) -> str:
        return self.text


def values_match(a: ClaimValue, b: ClaimValue) -> bool:
    return a.merge_key() == b.merge_key()


@dataclass(frozen=True)
class Span:
    """Half-open character interval [start, end) into the response text."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


@dataclass(frozen=True)
class Claim:
    """One verifiable assertion anchored to a span of the response text.

    object_span locates the value slot inside the span; theme_span locates
    the "Y" slot of verb-object-date patterns ("X published Y in Z").
    Both are used by the correction engine to splice replacements without
    touching surrounding text.
    """

    id: str
    subject: EntityRef
    predicate: str
    object: ClaimValue
    span: Span
    raw_text: str
    temporal_qualifier: tuple[int, int] | None = None
    object_span: Span | None = None
    theme_span: Span | None = None

    def __post_init__(self):
        if self.temporal_qualifier is not None:
            lo, hi = self.temporal_qualifier
            if lo > hi:
                raise ValueError(f"temporal qualifier reversed: {self.temporal_qualifier}")

    def fingerprint_parts(self) -> tuple:
        """Stable identity of the asserted fact (independent of span/text)."""
        return (
            self.subject.merge_key(),
            self.predicate,
            self.object.merge_key(),
            self.temporal_qualifier,
        )
