from factgate.evalharness.harness import (
    EmptyCorpus,
    EvalReport,
    ExampleLabel,
    GoldClaim,
    LabeledExample,
    UnknownSource,
    ablate,
    ablation_csv,
    evaluate,
    load_corpus,
    resolve_subset,
    save_corpus,
)
from factgate.evalharness.metrics import bleu4
from factgate.evalharness.synthesis import SynthesisSpec, generate_world, write_fixture_bundle

__all__ = [
    "EmptyCorpus",
    "EvalReport",
    "ExampleLabel",
    "GoldClaim",
    "LabeledExample",
    "SynthesisSpec",
    "UnknownSource",
    "ablate",
    "ablation_csv",
    "bleu4",
    "evaluate",
    "generate_world",
    "load_corpus",
    "resolve_subset",
    "save_corpus",
    "write_fixture_bundle",
]
