from factgate.claims.extractor import DEFAULT_VOCAB, ExtractorConfig, extract_claims
from factgate.claims.linking import AliasTable, link_entity, trigram_jaccard
from factgate.claims.model import (
    Claim,
    ClaimValue,
    DateValue,
    EntityKind,
    EntityRef,
    EntityValue,
    NumberValue,
    Span,
    TextValue,
    normalize_surface,
    values_match,
)

__all__ = [
    "AliasTable",
    "Claim",
    "ClaimValue",
    "DateValue",
    "DEFAULT_VOCAB",
    "EntityKind",
    "EntityRef",
    "EntityValue",
    "ExtractorConfig",
    "NumberValue",
    "Span",
    "TextValue",
    "extract_claims",
    "link_entity",
    "normalize_surface",
    "trigram_jaccard",
    "values_match",
]
