"""Desk-scale evaluation protocol: accuracy on gold claims, hallucination
reduction, calibration, latency, and BLEU-4 quality preservation, plus the
ablation matrix over source subsets.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

from factgate.claims.extractor import extract_claims
from factgate.claims.model import ClaimValue
from factgate.confidence.calibration import expected_calibration_error
from factgate.evalharness.metrics import bleu4
from factgate.pipeline.jsonio import value_from_dict, value_to_dict
from factgate.pipeline.orchestrator import Pipeline
from factgate.sources.base import SourceKind


class ExampleLabel(Enum):
    FACTUAL = "FACTUAL"
    HALLUCINATED = "HALLUCINATED"


class EmptyCorpus(ValueError):
    pass


class UnknownSource(ValueError):
    pass


@dataclass(frozen=True)
class GoldClaim:
    subject_id: str
    predicate: str
    value: ClaimValue


@dataclass(frozen=True)
class LabeledExample:
    input_text: str
    gold_claims: tuple[GoldClaim, ...]
    label: ExampleLabel

    def to_dict(self) -> dict:
        return {
            "input_text": self.input_text,
            "label": self.label.value,
            "gold_claims": [
                {"subject_id": g.subject_id, "predicate": g.predicate, "value": value_to_dict(g.value)}
                for g in self.gold_claims
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledExample":
        return cls(
            input_text=data["input_text"],
            gold_claims=tuple(
                GoldClaim(g["subject_id"], g["predicate"], value_from_dict(g["value"]))
                for g in data.get("gold_claims", [])
            ),
            label=ExampleLabel[data.get("label", "FACTUAL")],
        )


def load_corpus(path: str | Path) -> list[LabeledExample]:
    examples = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            examples.append(LabeledExample.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ValueError(f"{path}:{lineno}: bad example: {exc}") from exc
    return examples


def save_corpus(examples: Sequence[LabeledExample], path: str | Path) -> None:
    Path(path).write_text(
        "".join(json.dumps(ex.to_dict(), ensure_ascii=False) + "\n" for ex in examples),
        encoding="utf-8",
    )


@dataclass
class EvalReport:
    accuracy: float
    hallucination_reduction: float
    ece: float
    mean_latency_ms: float
    p95_latency_ms: float
    bleu4: float
    examples: int
    gold_claims: int
    pre_errors: int
    post_errors: int
    corrections: int
    configuration: str = "all"

    def to_dict(self) -> dict:
        return {
            "configuration": self.configuration,
            "accuracy": self.accuracy,
            "hallucination_reduction": self.hallucination_reduction,
            "ece": self.ece,
            "mean_latency_ms": self.mean_latency_ms,
            "p95_latency_ms": self.p95_latency_ms,
            "bleu4": self.bleu4,
            "examples": self.examples,
            "gold_claims": self.gold_claims,
            "pre_errors": self.pre_errors,
            "post_errors": self.post_errors,
            "corrections": self.corrections,
        }


def _asserted_values(text: str, pipeline: Pipeline) -> set[tuple[str, str, tuple]]:
    """(subject merge key, predicate, value merge key) asserted by the text."""
    return {
        (claim.subject.merge_key(), claim.predicate, claim.object.merge_key())
        for claim in extract_claims(text, pipeline.extractor_config)
    }


def evaluate(
    pipeline: Pipeline, corpus: Sequence[LabeledExample], configuration: str = "all"
) -> EvalReport:
    """Run the verifier over the corpus and score it against gold claims.

    accuracy: fraction of gold claims asserted correctly by the final text.
    hallucination_reduction: 1 - post_errors/pre_errors (0 when no pre
    errors, by convention). ECE pairs each original claim's combined
    confidence with its pre-correction correctness against gold.
    """
    if not corpus:
        raise EmptyCorpus("evaluation corpus is empty")
    pre_errors = 0
    post_errors = 0
    total_gold = 0
    corrections = 0
    latencies: list[float] = []
    bleu_scores: list[float] = []
    calibration_pairs: list[tuple[float, bool]] = []

    for example in corpus:
        result = pipeline.verify(example.input_text)
        corrections += len(result.corrections) if not result.rolled_back else 0
        latencies.append(result.timings.get("total_ms", 0.0))
        bleu_scores.append(bleu4(result.final_text, example.input_text))

        pre_asserted = _asserted_values(example.input_text, pipeline)
        post_asserted = _asserted_values(result.final_text, pipeline)
        gold_by_sp: dict[tuple[str, str], set[tuple]] = {}
        for gold in example.gold_claims:
            total_gold += 1
            key = (gold.subject_id, gold.predicate)
            gold_by_sp.setdefault(key, set()).add(gold.value.merge_key())
            triple = (gold.subject_id, gold.predicate, gold.value.merge_key())
            if triple not in pre_asserted:
                pre_errors += 1
            if triple not in post_asserted:
                post_errors += 1

        for verdict in result.verdicts:
            sp = (verdict.claim.subject.merge_key(), verdict.claim.predicate)
            gold_values = gold_by_sp.get(sp)
            if gold_values is None:
                continue  # no gold for this assertion; truth unknown
            correct = verdict.claim.object.merge_key() in gold_values
            calibration_pairs.append((verdict.breakdown.combined, correct))

    accuracy = (total_gold - post_errors) / total_gold if total_gold else 1.0
    reduction = 0.0 if pre_errors == 0 else 1.0 - post_errors / pre_errors
    ece = expected_calibration_error(calibration_pairs).ece if calibration_pairs else 0.0
    latencies.sort()
    p95 = latencies[min(len(latencies) - 1, int(0.95 * len(latencies)))] if latencies else 0.0
    return EvalReport(
        accuracy=accuracy,
        hallucination_reduction=reduction,
        ece=ece,
        mean_latency_ms=statistics.fmean(latencies) if latencies else 0.0,
        p95_latency_ms=p95,
        bleu4=statistics.fmean(bleu_scores) if bleu_scores else 0.0,
        examples=len(corpus),
        gold_claims=total_gold,
        pre_errors=pre_errors,
        post_errors=post_errors,
        corrections=corrections,
        configuration=configuration,
    )


_KIND_TOKENS = {
    "kg": SourceKind.KNOWLEDGE_GRAPH,
    "web": SourceKind.WEB_SEARCH,
    "db": SourceKind.DOMAIN_DB,
}


def resolve_subset(token: str, pipeline_config) -> list[str]:
    """Map a subset token ('kg', 'kg+web', 'all') to source ids."""
    token = token.strip().lower()
    if not token:
        raise UnknownSource("empty source subset")
    if token == "all":
        return [s.source_id for s in pipeline_config.sources]
    ids: list[str] = []
    known = {s.source_id for s in pipeline_config.sources}
    for part in token.split("+"):
        part = part.strip()
        if part in _KIND_TOKENS:
            kind = _KIND_TOKENS[part]
            matched = [s.source_id for s in pipeline_config.sources if s.kind is kind]
            if not matched:
                raise UnknownSource(f"no configured source of kind {part!r}")
            ids.extend(matched)
        elif part in known:
            ids.append(part)
        else:
            raise UnknownSource(f"unknown source or kind: {part!r}")
    return ids


def ablate(
    base_config, corpus: Sequence[LabeledExample], subsets: Sequence[str]
) -> list[EvalReport]:
    """Evaluate once per source subset; one report row per subset."""
    if not subsets:
        raise UnknownSource("no subsets requested")
    rows = []
    for token in subsets:
        ids = resolve_subset(token, base_config)
        pipeline = Pipeline(base_config.with_enabled(ids))
        rows.append(evaluate(pipeline, corpus, configuration=token.strip().lower()))
    return rows


def ablation_csv(rows: Sequence[EvalReport]) -> str:
    lines = ["configuration,accuracy,hallucination_reduction,mean_latency_ms"]
    for row in rows:
        lines.append(
            f"{row.configuration},{row.accuracy:.6g},"
            f"{row.hallucination_reduction:.6g},{row.mean_latency_ms:.6g}"
        )
    return "\n".join(lines) + "\n"
