from factgate.sources.base import (
    DEFAULT_STANCE_MARGIN,
    MULTI_VALUE_SUPPORT_FLOOR,
    Evidence,
    SourceHandle,
    SourceKind,
    SourceProfile,
    SourceTimeout,
    SourceUnavailable,
    Stance,
    aggregate_hits,
    build_evidence,
    decide_stance,
)
from factgate.sources.cache import VerdictCache, claim_fingerprint
from factgate.sources.corpus import CorpusIndex, Document, DomainCorpusSource, tokenize
from factgate.sources.mockserver import MockKnowledgeServer
from factgate.sources.triplestore import KnowledgeGraphSource, Triple, TripleStore
from factgate.sources.webadapter import WebSearchSource, parse_hit_value

__all__ = [
    "CorpusIndex",
    "DEFAULT_STANCE_MARGIN",
    "Document",
    "DomainCorpusSource",
    "Evidence",
    "KnowledgeGraphSource",
    "MockKnowledgeServer",
    "MULTI_VALUE_SUPPORT_FLOOR",
    "SourceHandle",
    "SourceKind",
    "SourceProfile",
    "SourceTimeout",
    "SourceUnavailable",
    "Stance",
    "Triple",
    "TripleStore",
    "VerdictCache",
    "WebSearchSource",
    "aggregate_hits",
    "build_evidence",
    "claim_fingerprint",
    "decide_stance",
    "parse_hit_value",
    "tokenize",
]
