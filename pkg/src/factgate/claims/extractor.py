"""Deterministic pattern-grammar claim extraction.

Recognized sentence shapes:

* verb-object-date:  "X published Y in 1905" (coordination supported:
  "... special relativity in 1905 and general relativity in 1915")
* quantity:          "X has 12 floors"
* copular measure:   "X is 300 meters tall"
* location:          "X is in Port Sorel"
* copular identity:  "X is the capital of Freedonia"

Sentences matching no pattern yield no claim. Extraction is a pure function
of (text, config): same input, same claims, byte for byte. Pronoun subjects
are rejected (no coreference resolution), which also drops opinion sentences
like "It is nice."
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from factgate.claims.linking import AliasTable, DEFAULT_LINK_THRESHOLD, link_entity
from factgate.claims.model import (
    Claim,
    ClaimValue,
    DateValue,
    EntityRef,
    EntityValue,
    NumberValue,
    Span,
    TextValue,
)

_PRONOUNS = {
    "it", "he", "she", "they", "this", "that", "these", "those",
    "i", "we", "you", "there", "its", "his", "her", "their",
}
_COPULAS = {"is", "was", "are", "were"}
_ARTICLES = {"the", "a", "an"}

# Words ending in "ed" that are not past-tense verbs (anchor heuristic guard).
_ED_BLOCKLIST = {
    "hundred", "thousand", "indeed", "need", "speed", "feed", "breed",
    "exceed", "proceed", "succeed", "naked", "sacred", "wicked", "bed", "red",
}

DEFAULT_VOCAB = """\
# predicate = surface forms; '*' marks predicates that admit multiple true objects
published* = published, publishes, publish, released, releases, issued
discovered* = discovered, discovers, discover, identified, observed
won* = won, wins, win, received, earned
wrote* = wrote, writes, authored, penned
invented* = invented, invents, devised
founded = founded, established, formed, launched
born = born
died = died
built = built, constructed
joined = joined
"""


@dataclass
class ExtractorConfig:
    """Closed predicate vocabulary plus optional entity linking resources."""

    surface_to_label: dict[str, str] = field(default_factory=dict)
    multi_valued: set[str] = field(default_factory=set)
    alias_table: AliasTable | None = None
    link_threshold: float = DEFAULT_LINK_THRESHOLD

    @classmethod
    def parse_vocab(cls, text: str, **kwargs) -> "ExtractorConfig":
        surface_to_label: dict[str, str] = {}
        multi_valued: set[str] = set()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"vocab line {lineno}: expected 'predicate = surfaces'")
            label, _, surfaces = line.partition("=")
            label = label.strip()
            if label.endswith("*"):
                label = label[:-1].strip()
                multi_valued.add(label)
            for surface in surfaces.split(","):
                surface = surface.strip().lower()
                if surface:
                    surface_to_label[surface] = label
        return cls(surface_to_label, multi_valued, **kwargs)

    @classmethod
    def load(cls, vocab_path: str | Path, **kwargs) -> "ExtractorConfig":
        return cls.parse_vocab(Path(vocab_path).read_text(encoding="utf-8"), **kwargs)

    @classmethod
    def default(cls, **kwargs) -> "ExtractorConfig":
        return cls.parse_vocab(DEFAULT_VOCAB, **kwargs)

    def normalize_predicate(self, verb: str) -> str:
        return self.surface_to_label.get(verb.lower(), "related_to")

    def is_multi_valued(self, predicate: str) -> bool:
        return predicate in self.multi_valued

    def is_anchor_verb(self, word: str) -> bool:
        w = word.lower()
        if w in _COPULAS:
            return False
        if w in self.surface_to_label:
            return True
        return len(w) >= 4 and w.endswith("ed") and w not in _ED_BLOCKLIST


_SENTENCE = re.compile(r"[^.!?]+(?:[.!?]+|$)")
_WORD = re.compile(r"[A-Za-z][\w'-]*")
_NUMBER = r"-?\d+(?:\.\d+)?"

_MEASURE = re.compile(
    rf"^(?P<subj>.+?)\s+(?:is|was|are|were)\s+(?P<num>{_NUMBER})\s+(?P<unit>[A-Za-z]+)"
    r"(?:\s+(?:tall|high|long|wide|deep|old|heavy))?\s*[.!?]*$"
)
_QUANTITY = re.compile(
    rf"^(?P<subj>.+?)\s+(?:has|have|had)\s+(?P<num>{_NUMBER})\s+(?P<unit>[A-Za-z]+)\s*[.!?]*$"
)
_LOCATED = re.compile(
    r"^(?P<subj>.+?)\s+(?:is|was|are|were)\s+(?:located\s+)?in\s+(?P<place>[A-Z][^().!?]*?)"
    r"\s*(?:\([^)]*\))?\s*[.!?]*$"
)
_COPULAR = re.compile(
    r"^(?P<subj>.+?)\s+(?:is|was|are|were)\s+(?P<obj>(?:the\s|an?\s|[A-Z0-9])[^().!?]*?)"
    r"\s*(?:\([^)]*\))?\s*[.!?]*$"
)
# "[theme] in YEAR" or a bare coordinated year ("... in 1905 and 1915")
_CHUNK = re.compile(r"^(?:(?:(?P<theme>.+?)\s+)?in\s+)?(?P<year>\d{3,4})\s*[.!?]*$")
_AND_SPLIT = re.compile(r",?\s+and\s+")


def _sentences(text: str):
    for m in _SENTENCE.finditer(text):
        raw = m.group(0)
        lead = len(raw) - len(raw.lstrip())
        trail = len(raw) - len(raw.rstrip())
        start, end = m.start() + lead, m.end() - trail
        if start < end:
            yield start, end, text[start:end]


def _first_word(text: str) -> str:
    m = _WORD.search(text)
    return m.group(0).lower() if m else ""


def _valid_subject(subj: str) -> bool:
    subj = subj.strip()
    if not subj:
        return False
    first = _first_word(subj)
    if first in _PRONOUNS:
        return False
    head = subj if first not in _ARTICLES else subj.split(None, 1)[-1]
    return bool(head) and (head[0].isupper() or head[0].isdigit())


def _strip_article(subj: str) -> str:
    parts = subj.split(None, 1)
    if len(parts) == 2 and parts[0].lower() in _ARTICLES:
        return parts[1]
    return subj


def _link_subject(subj: str, config: ExtractorConfig) -> EntityRef:
    return link_entity(_strip_article(subj.strip()), config.alias_table, config.link_threshold)


def _object_value(obj_text: str, config: ExtractorConfig) -> ClaimValue:
    ref = link_entity(obj_text, config.alias_table, config.link_threshold)
    if ref.linked:
        return EntityValue(ref)
    if obj_text[:1].isupper() and _first_word(obj_text) not in _ARTICLES:
        return EntityValue(EntityRef.unlinked(obj_text))
    return TextValue(obj_text)


def _extract_verb_date(sent: str, base: int, text: str, config: ExtractorConfig):
    """verb-object-date with optional coordination; returns [] if no parse."""
    tokens = [(m.group(0), m.start(), m.end()) for m in re.finditer(r"\S+", sent)]
    for i, (tok, _tok_start, tok_end) in enumerate(tokens):
        word = _WORD.search(tok)
        if word is None or not config.is_anchor_verb(word.group(0)):
            continue
        subj_end_idx = i
        if subj_end_idx > 0 and tokens[subj_end_idx - 1][0].lower() in _COPULAS:
            subj_end_idx -= 1
        if subj_end_idx == 0:
            continue
        subj = sent[: tokens[subj_end_idx - 1][2]]
        if not _valid_subject(subj):
            continue
        rest_start = tok_end
        rest = sent[rest_start:]
        if not rest.strip():
            continue

        # Split coordinated chunks; every piece must parse as "[theme] in YEAR".
        pieces: list[tuple[int, str]] = []
        cursor = 0
        for sep in _AND_SPLIT.finditer(rest):
            pieces.append((cursor, rest[cursor : sep.start()]))
            cursor = sep.end()
        pieces.append((cursor, rest[cursor:]))

        parsed = []
        current_predicate = config.normalize_predicate(word.group(0))
        ok = True
        for piece_off, piece in pieces:
            stripped = piece.strip()
            pad = len(piece) - len(piece.lstrip())
            piece_base = base + rest_start + piece_off + pad  # absolute offset of `stripped`
            m = _CHUNK.match(stripped)
            if m is None:
                ok = False
                break
            theme_start, theme_end = m.span("theme") if m.group("theme") else (0, 0)
            theme = m.group("theme")
            if theme:
                theme_first = _first_word(theme)
                if config.is_anchor_verb(theme_first) and theme_first != theme.strip().lower():
                    # coordination introduced a new verb: "... and won the prize in 1921"
                    current_predicate = config.normalize_predicate(theme_first)
                    trimmed = theme[len(theme_first) :].lstrip()
                    theme_start = theme_end - len(trimmed)
                    theme = trimmed or None
            theme_span = (
                Span(piece_base + theme_start, piece_base + theme_end) if theme else None
            )
            year_span = Span(piece_base + m.start("year"), piece_base + m.end("year"))
            parsed.append((current_predicate, theme_span, int(m.group("year")), year_span))
        if not ok or not parsed:
            continue

        subject = _link_subject(subj, config)
        claims = []
        for idx, (pred, theme_span, year, year_span) in enumerate(parsed):
            if idx == 0:
                span_start = base
            else:
                span_start = theme_span.start if theme_span else year_span.start
            span_end = base + len(sent) if idx == len(parsed) - 1 else year_span.end
            span = Span(span_start, span_end)
            claims.append(
                dict(
                    subject=subject,
                    predicate=pred,
                    object=DateValue(year),
                    span=span,
                    raw_text=span.slice(text),
                    object_span=year_span,
                    theme_span=theme_span,
                )
            )
        return claims
    return []


def extract_claims(response_text: str, config: ExtractorConfig | None = None) -> list[Claim]:
    """Extract claims in span order; spans never overlap.

    Unparseable text yields an empty list, never an error.
    """
    if config is None:
        config = ExtractorConfig.default()
    claims: list[Claim] = []
    for base, sent_end, sent in _sentences(response_text):
        found = _extract_verb_date(sent, base, response_text, config)

        if not found:
            m = _QUANTITY.match(sent)
            if m and _valid_subject(m.group("subj")):
                value = NumberValue(float(m.group("num")), m.group("unit"))
                found = [
                    dict(
                        subject=_link_subject(m.group("subj"), config),
                        predicate="has",
                        object=value,
                        span=Span(base, sent_end),
                        raw_text=sent,
                        object_span=Span(base + m.start("num"), base + m.end("unit")),
                        theme_span=None,
                    )
                ]

        if not found:
            m = _MEASURE.match(sent)
            if m and _valid_subject(m.group("subj")):
                value = NumberValue(float(m.group("num")), m.group("unit"))
                found = [
                    dict(
                        subject=_link_subject(m.group("subj"), config),
                        predicate="measures",
                        object=value,
                        span=Span(base, sent_end),
                        raw_text=sent,
                        object_span=Span(base + m.start("num"), base + m.end("unit")),
                        theme_span=None,
                    )
                ]

        if not found:
            m = _LOCATED.match(sent)
            if m and _valid_subject(m.group("subj")):
                place = m.group("place").strip()
                ref = link_entity(place, config.alias_table, config.link_threshold)
                if not ref.linked:
                    ref = EntityRef.unlinked(place)
                found = [
                    dict(
                        subject=_link_subject(m.group("subj"), config),
                        predicate="located_in",
                        object=EntityValue(ref),
                        span=Span(base, sent_end),
                        raw_text=sent,
                        object_span=Span(base + m.start("place"), base + m.start("place") + len(place)),
                        theme_span=None,
                    )
                ]

        if not found:
            m = _COPULAR.match(sent)
            if m and _valid_subject(m.group("subj")):
                obj_text = m.group("obj").strip()
                found = [
                    dict(
                        subject=_link_subject(m.group("subj"), config),
                        predicate="is",
                        object=_object_value(obj_text, config),
                        span=Span(base, sent_end),
                        raw_text=sent,
                        object_span=Span(base + m.start("obj"), base + m.start("obj") + len(obj_text)),
                        theme_span=None,
                    )
                ]

        claims.extend(found)

    return [Claim(id=f"c{i + 1}", **fields) for i, fields in enumerate(claims)]
