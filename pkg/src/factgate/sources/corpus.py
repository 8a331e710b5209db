"""Inverted-index document corpus with BM25 retrieval and an evidence
adapter that mines asserted values out of the retrieved documents.

Scoring is BM25 (k1=1.2, b=0.75) times document authority, so credible
domains outrank equally matching but less authoritative ones. Ties break
by ascending doc_id for determinism.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import re
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from factgate.claims.extractor import ExtractorConfig, extract_claims
from factgate.claims.model import Claim
from factgate.sources.base import (
    DEFAULT_STANCE_MARGIN,
    Evidence,
    SourceProfile,
    aggregate_hits,
    build_evidence,
)

BM25_K1 = 1.2
BM25_B = 0.75

_TOKEN = re.compile(r"\b\w+\b")

STOPWORDS = frozenset(
    """a an and are as at be by for from has have had in into is it its of on
    or that the their there these this to was were whether will with""".split()
)


def tokenize(text: str, drop_stopwords: bool = True) -> list[str]:
    tokens = [t.lower() for t in _TOKEN.findall(text)]
    if drop_stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    return tokens


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    domain_tag: str = ""
    authority: float = 0.5
    published: dt.date | None = None
    citation_count: int = 0

    def __post_init__(self):
        if not 0.0 <= self.authority <= 1.0:
            raise ValueError(f"authority out of [0,1]: {self.authority}")


class CorpusIndex:
    """Immutable-after-build inverted index over a document list."""

    def __init__(self, documents: list[Document]):
        self.documents = sorted(documents, key=lambda d: d.doc_id)
        self._by_id = {d.doc_id: d for d in self.documents}
        if len(self._by_id) != len(self.documents):
            raise ValueError("duplicate doc_id in corpus")
        self._postings: dict[str, list[tuple[str, int]]] = {}
        self._doc_len: dict[str, int] = {}
        for doc in self.documents:
            tokens = tokenize(doc.text, drop_stopwords=False)
            self._doc_len[doc.doc_id] = len(tokens)
            for term, tf in sorted(Counter(tokens).items()):
                self._postings.setdefault(term, []).append((doc.doc_id, tf))
        n = len(self.documents)
        self._avgdl = (sum(self._doc_len.values()) / n) if n else 0.0

    def __len__(self) -> int:
        return len(self.documents)

    def _idf(self, term: str) -> float:
        df = len(self._postings.get(term, ()))
        if df == 0:
            return 0.0
        return math.log((len(self.documents) - df + 0.5) / (df + 0.5) + 1.0)

    def bm25(self, query_terms: list[str], doc_id: str) -> float:
        score = 0.0
        dl = self._doc_len[doc_id]
        for term in query_terms:
            idf = self._idf(term)
            if idf == 0.0:
                continue
            tf = 0
            for posting_doc, posting_tf in self._postings.get(term, ()):
                if posting_doc == doc_id:
                    tf = posting_tf
                    break
            if tf == 0:
                continue
            denom = tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / (self._avgdl or 1.0))
            score += idf * tf * (BM25_K1 + 1.0) / denom
        return score

    def search(self, query_terms: list[str], k: int) -> list[tuple[Document, float]]:
        """Top-k (document, score) by BM25 x authority, ties by doc_id."""
        if k < 1:
            raise ValueError("k must be >= 1")
        scores: dict[str, float] = {}
        for term in set(query_terms):
            idf = self._idf(term)
            if idf == 0.0:
                continue
            for doc_id, tf in self._postings.get(term, ()):
                dl = self._doc_len[doc_id]
                denom = tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / (self._avgdl or 1.0))
                scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (BM25_K1 + 1.0) / denom
        weighted = [
            (self._by_id[doc_id], bm25 * self._by_id[doc_id].authority)
            for doc_id, bm25 in scores.items()
        ]
        weighted.sort(key=lambda pair: (-pair[1], pair[0].doc_id))
        return weighted[:k]

    @classmethod
    def load(cls, path: str | Path) -> "CorpusIndex":
        """JSON-lines, one document per line; dates ISO-8601."""
        documents = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            documents.append(
                Document(
                    doc_id=row["doc_id"],
                    text=row["text"],
                    domain_tag=row.get("domain_tag", ""),
                    authority=float(row.get("authority", 0.5)),
                    published=dt.date.fromisoformat(row["published"]) if row.get("published") else None,
                    citation_count=int(row.get("citation_count", 0)),
                )
            )
        return cls(documents)


class DomainCorpusSource:
    """Evidence adapter over a CorpusIndex.

    Retrieved documents are mined with the same deterministic claim grammar;
    a document contributes the values it asserts for the claim's subject and
    predicate, weighted by its authority.
    """

    def __init__(
        self,
        profile: SourceProfile,
        index: CorpusIndex,
        extractor_config: ExtractorConfig,
        stance_margin: float = DEFAULT_STANCE_MARGIN,
    ):
        self.profile = profile
        self.index = index
        self.extractor_config = extractor_config
        self.stance_margin = stance_margin

    def healthy(self) -> bool:
        return True

    def query(self, claim: Claim) -> Evidence:
        started = time.perf_counter()
        terms = tokenize(claim.raw_text)
        hits = self.index.search(terms, self.profile.max_results) if terms else []
        subject_key = claim.subject.merge_key()

        contributions = []  # (value, doc, label)
        for doc, _score in hits:
            for mined in extract_claims(doc.text, self.extractor_config):
                if mined.predicate != claim.predicate:
                    continue
                if mined.subject.merge_key() != subject_key:
                    continue
                label = mined.theme_span.slice(doc.text) if mined.theme_span else None
                contributions.append((mined.object, doc, label))

        latency_ms = (time.perf_counter() - started) * 1000.0
        if not contributions:
            return Evidence.insufficient(
                self.profile.source_id, claim.id, self.profile.base_reliability, latency_ms
            )

        distribution = aggregate_hits((value, doc.authority) for value, doc, _ in contributions)
        labels = {}
        for value, _doc, label in contributions:
            if label:
                labels.setdefault(value, label)
        docs = []
        for _value, doc, _label in contributions:
            if doc not in docs:
                docs.append(doc)
        authority = sum(d.authority for d in docs) / len(docs)
        recency = max((d.published for d in docs if d.published), default=None)
        citations = max(d.citation_count for d in docs)
        snippet = " ".join(d.text for d in docs[:3])
        return build_evidence(
            self.profile,
            claim,
            distribution,
            authority=authority,
            recency=recency,
            citation_count=citations,
            latency_ms=latency_ms,
            snippet=snippet,
            value_labels=labels,
            stance_margin=self.stance_margin,
            multi_valued=self.extractor_config.is_multi_valued(claim.predicate),
        )
