"""Stable JSON serialization for service output.

Field order is the construction order of the dicts, floats print at six
significant digits, and no whitespace varies — so a verification run over
fixed fixtures produces byte-identical bytes every time.
"""

from __future__ import annotations

import json
from typing import Any

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


def format_float(value: float) -> str:
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite float in output: {value}")
    text = format(value, ".6g")
    return text


def stable_dumps(obj: Any) -> str:
    """json.dumps with deterministic float formatting; dict order is the
    caller's insertion order."""
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts)


def _write(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(format_float(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(key), ensure_ascii=False))
            parts.append(":")
            _write(value, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, value in enumerate(obj):
            if i:
                parts.append(",")
            _write(value, parts)
        parts.append("]")
    else:
        raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def entity_to_dict(ref: EntityRef) -> dict:
    return {
        "canonical_id": ref.canonical_id,
        "surface_form": ref.surface_form,
        "kind": ref.kind.value,
        "link_score": ref.link_score,
    }


def value_to_dict(value: ClaimValue) -> dict:
    if isinstance(value, DateValue):
        out: dict = {"type": "date", "year": value.year}
        if value.month is not None:
            out["month"] = value.month
        if value.day is not None:
            out["day"] = value.day
        return out
    if isinstance(value, NumberValue):
        out = {"type": "number", "value": value.value}
        if value.unit is not None:
            out["unit"] = value.unit
        return out
    if isinstance(value, EntityValue):
        return {"type": "entity", **entity_to_dict(value.entity)}
    if isinstance(value, TextValue):
        return {"type": "text", "text": value.text}
    raise TypeError(f"unknown claim value: {type(value)!r}")


def value_from_dict(data: dict) -> ClaimValue:
    kind = data.get("type", "text")
    if kind == "date":
        return DateValue(int(data["year"]), data.get("month"), data.get("day"))
    if kind == "number":
        return NumberValue(float(data["value"]), data.get("unit"))
    if kind == "entity":
        from factgate.claims.model import EntityKind

        link_score = float(data.get("link_score", 1.0 if data.get("canonical_id") else 0.0))
        return EntityValue(
            EntityRef(
                data.get("canonical_id", ""),
                data.get("surface_form", data.get("canonical_id", "")),
                EntityKind[data.get("kind", "OTHER")],
                link_score,
            )
        )
    if kind == "text":
        return TextValue(data["text"])
    raise ValueError(f"unknown value type: {kind!r}")


def span_to_list(span: Span | None) -> list[int] | None:
    return [span.start, span.end] if span is not None else None


def claim_to_dict(claim: Claim) -> dict:
    return {
        "id": claim.id,
        "subject": entity_to_dict(claim.subject),
        "predicate": claim.predicate,
        "object": value_to_dict(claim.object),
        "span": span_to_list(claim.span),
        "raw_text": claim.raw_text,
        "temporal_qualifier": list(claim.temporal_qualifier) if claim.temporal_qualifier else None,
    }
