"""Synthetic evaluation-world generator.

Plants gold facts into all three fixture sources with configurable
per-source coverage, then renders labeled examples from sentence templates,
injecting typed errors (wrong date, wrong number, wrong entity) into the
hallucinated ones. Coverage is drawn per fact and per source, so adding a
source never removes evidence: accuracy is monotone in the enabled subset
by construction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from factgate.claims.extractor import DEFAULT_VOCAB
from factgate.claims.model import ClaimValue, DateValue, EntityValue, NumberValue
from factgate.evalharness.harness import ExampleLabel, GoldClaim, LabeledExample, save_corpus

_PEOPLE = [
    "Ada Varen", "Rosa Quill", "Omar Telles", "Ivy Marek",
    "Noel Bastin", "Lena Korvath", "Hugo Ferrant", "Mira Solenne",
    "Theo Lindqvist", "Petra Havel",
]
_WORKS = [
    "The Silent Meridian", "The Glass Annals", "A Study of Tides", "The Crimson Ledger",
    "Notes on Falling Light", "The Iron Meadow", "Songs of the Estuary", "The Hollow Atlas",
    "The Painted Harbor", "A Field Guide to Echoes", "The Last Cartographer",
    "Letters from the Brink", "The Quiet Engine", "Maps of Nowhere",
    "The Salt Archive", "The Winter Accord", "The Amber Causeway", "Fables of the Shoal",
    "The Pale Observatory", "Catalogue of Small Storms",
]
_TOWERS = [
    "Veylan Tower", "Solenne Spire", "Korvath Obelisk",
    "Bastin Column", "Meridian Pylon", "Quill Beacon",
]
_CITIES = ["Port Sorel", "Karsk", "New Alder", "Vakkerlund", "Tessombra", "Brinmore"]

_SOURCES = ("kg", "web", "db")


@dataclass(frozen=True)
class SynthesisSpec:
    seed: int = 7
    n_people: int = 8
    n_towers: int = 6
    hallucination_rate: float = 0.5
    coverage: dict[str, float] = field(
        default_factory=lambda: {"kg": 0.75, "web": 0.7, "db": 0.65}
    )
    web_endpoint: str = "http://127.0.0.1:8099/search"


@dataclass(frozen=True)
class Fact:
    """One (subject, predicate) gold fact; multi-valued facts carry several
    (value, label) pairs."""

    subject_id: str
    subject_surface: str
    predicate: str
    values: tuple[tuple[ClaimValue, str | None], ...]
    covered_by: frozenset[str]
    kind: str  # published | born | measures | located


@dataclass
class World:
    facts: list[Fact]
    aliases: list[tuple[str, str, str]]  # (canonical_id, kind, alias)
    examples: list[LabeledExample]
    spec: SynthesisSpec


def _draw_coverage(rng: random.Random, spec: SynthesisSpec) -> frozenset[str]:
    covered = {s for s in _SOURCES if rng.random() < spec.coverage[s]}
    return frozenset(covered)


def generate_world(spec: SynthesisSpec) -> World:
    rng = random.Random(spec.seed)
    facts: list[Fact] = []
    aliases: list[tuple[str, str, str]] = []
    examples: list[LabeledExample] = []

    people = _PEOPLE[: spec.n_people]
    towers = _TOWERS[: spec.n_towers]
    works = list(_WORKS)
    rng.shuffle(works)

    def hallucinate() -> bool:
        return rng.random() < spec.hallucination_rate

    for p, name in enumerate(people):
        pid = f"q_p{p}"
        aliases.append((pid, "PERSON", name))
        # two published works: exercises multi-value substitution
        w1, w2 = works[2 * p], works[2 * p + 1]
        y1 = rng.randrange(1890, 1950)
        y2 = y1 + rng.randrange(3, 25)
        facts.append(
            Fact(pid, name, "published",
                 ((DateValue(y1), w1), (DateValue(y2), w2)),
                 _draw_coverage(rng, spec), "published")
        )
        born = y1 - rng.randrange(20, 45)
        facts.append(
            Fact(pid, name, "born", ((DateValue(born), None),),
                 _draw_coverage(rng, spec), "born")
        )

        if hallucinate():
            wrong = y1 + rng.choice([-1, 1]) * rng.randrange(5, 40)
            examples.append(LabeledExample(
                f"{name} published {w1} in {wrong}.",
                (GoldClaim(pid, "published", DateValue(y1)),),
                ExampleLabel.HALLUCINATED,
            ))
        else:
            examples.append(LabeledExample(
                f"{name} published {w1} in {y1}.",
                (GoldClaim(pid, "published", DateValue(y1)),),
                ExampleLabel.FACTUAL,
            ))
        if hallucinate():
            wrong = born + rng.choice([-1, 1]) * rng.randrange(4, 30)
            examples.append(LabeledExample(
                f"{name} was born in {wrong}.",
                (GoldClaim(pid, "born", DateValue(born)),),
                ExampleLabel.HALLUCINATED,
            ))
        else:
            examples.append(LabeledExample(
                f"{name} was born in {born}.",
                (GoldClaim(pid, "born", DateValue(born)),),
                ExampleLabel.FACTUAL,
            ))

    cities = list(_CITIES)
    for c, city in enumerate(cities):
        aliases.append((f"q_c{c}", "PLACE", city))

    for t, tower in enumerate(towers):
        tid = f"q_t{t}"
        aliases.append((tid, "PLACE", tower))
        height = float(rng.randrange(80, 600))
        city_index = rng.randrange(len(cities))
        city = cities[city_index]
        city_id = f"q_c{city_index}"
        city_value = EntityValue(_entity_for(city_id, city))
        facts.append(
            Fact(tid, tower, "measures", ((NumberValue(height, "meters"), None),),
                 _draw_coverage(rng, spec), "measures")
        )
        facts.append(
            Fact(tid, tower, "located_in", ((city_value, None),),
                 _draw_coverage(rng, spec), "located")
        )

        if hallucinate():
            wrong_height = height + float(rng.randrange(40, 300))
            examples.append(LabeledExample(
                f"The {tower} is {wrong_height:.0f} meters tall.",
                (GoldClaim(tid, "measures", NumberValue(height, "meters")),),
                ExampleLabel.HALLUCINATED,
            ))
        else:
            examples.append(LabeledExample(
                f"The {tower} is {height:.0f} meters tall.",
                (GoldClaim(tid, "measures", NumberValue(height, "meters")),),
                ExampleLabel.FACTUAL,
            ))
        if hallucinate():
            wrong_index = (city_index + 1 + rng.randrange(len(cities) - 1)) % len(cities)
            wrong_city = cities[wrong_index]
            examples.append(LabeledExample(
                f"The {tower} is in {wrong_city}.",
                (GoldClaim(tid, "located_in", city_value),),
                ExampleLabel.HALLUCINATED,
            ))
        else:
            examples.append(LabeledExample(
                f"The {tower} is in {city}.",
                (GoldClaim(tid, "located_in", city_value),),
                ExampleLabel.FACTUAL,
            ))

    rng.shuffle(examples)
    return World(facts=facts, aliases=aliases, examples=examples, spec=spec)


def _entity_for(canonical_id: str, surface: str):
    from factgate.claims.model import EntityKind, EntityRef

    return EntityRef(canonical_id, surface, EntityKind.PLACE, 1.0)


def _fact_sentence(fact: Fact, value: ClaimValue, label: str | None) -> str:
    if fact.kind == "published":
        return f"{fact.subject_surface} published {label} in {value.render()}."
    if fact.kind == "born":
        return f"{fact.subject_surface} was born in {value.render()}."
    if fact.kind == "measures":
        return f"The {fact.subject_surface} is {value.render()} tall."
    return f"The {fact.subject_surface} is in {value.render()}."


def _kg_rows(facts: list[Fact]) -> list[str]:
    rows = []
    for fact in facts:
        if "kg" not in fact.covered_by:
            continue
        for value, label in fact.values:
            if isinstance(value, DateValue):
                obj_type, obj_value = "date", str(value.year)
            elif isinstance(value, NumberValue):
                obj_type = "number"
                obj_value = f"{value.render()}"
            elif isinstance(value, EntityValue):
                obj_type, obj_value = "entity", value.entity.canonical_id
                label = label or value.entity.surface_form
            else:
                obj_type, obj_value = "text", value.render()
            rows.append(
                "\t".join([fact.subject_id, fact.predicate, obj_type, obj_value,
                           "", "", "0.96", label or ""])
            )
    return rows


def _corpus_rows(facts: list[Fact], rng: random.Random) -> list[dict]:
    rows = []
    i = 0
    for fact in facts:
        if "db" not in fact.covered_by:
            continue
        for value, label in fact.values:
            rows.append({
                "doc_id": f"d{i:04d}",
                "text": _fact_sentence(fact, value, label),
                "domain_tag": "synthetic",
                "authority": round(0.82 + 0.14 * rng.random(), 3),
                "published": f"202{rng.randrange(3, 5)}-0{rng.randrange(1, 10)}-1{rng.randrange(0, 9)}",
                "citation_count": rng.randrange(40, 4000),
            })
            i += 1
    return rows


def _web_entries(facts: list[Fact], rng: random.Random) -> list[dict]:
    """First-match-wins entries; located entries precede measure entries so
    'X is in CITY' never falls through to the 'X is' match."""
    located, other = [], []
    for fact in facts:
        if "web" not in fact.covered_by:
            continue
        if fact.kind == "published":
            match = f"{fact.subject_surface.casefold()} published"
        elif fact.kind == "born":
            match = f"{fact.subject_surface.casefold()} was born"
        elif fact.kind == "located":
            match = f"{fact.subject_surface.casefold()} is in"
        else:
            match = f"{fact.subject_surface.casefold()} is"
        hits = []
        for value, label in fact.values:
            if isinstance(value, DateValue):
                value_json, value_type = value.year, "date"
            elif isinstance(value, NumberValue):
                value_json, value_type = value.render(), "number"
            elif isinstance(value, EntityValue):
                value_json, value_type = value.entity.surface_form, "entity"
            else:
                value_json, value_type = value.render(), "text"
            hits.append({
                "snippet": _fact_sentence(fact, value, label),
                "value": value_json,
                "value_type": value_type,
                "authority": round(0.8 + 0.15 * rng.random(), 3),
                "published": f"202{rng.randrange(3, 5)}-0{rng.randrange(1, 10)}-0{rng.randrange(1, 9)}",
                "citations": rng.randrange(10, 800),
            })
        entry = {"match": match, "hits": hits}
        (located if fact.kind == "located" else other).append(entry)
    return located + other


_CONFIG_TEMPLATE = """\
[pipeline]
tau_confidence = 0.7
evidence_budget_ms = 800

[service]
bind = "127.0.0.1:8080"
max_concurrent = 100

[confidence]
alpha = 0.3
beta = 0.5
gamma = 0.2
intrinsic_provider = "constant"
intrinsic_value = 0.9

[fusion]
tau_consistency = 0.5
as_of = "2025-01-01"

[cache]
capacity = 1000
ttl_seconds = 300.0

[extractor]
vocab_file = "vocab.txt"
alias_file = "aliases.tsv"

[correction]
hedge_phrase = "It is uncertain whether "

[correction.attribution_labels]
kg-main = "the knowledge graph"
web-search = "web sources"
domain-db = "the document archive"

[[sources]]
id = "kg-main"
kind = "knowledge_graph"
path = "kg.tsv"
reliability = 0.94
weight = 0.4

[[sources]]
id = "web-search"
kind = "web_search"
endpoint = "{web_endpoint}"
reliability = 0.85
weight = 0.35
timeout_ms = 2000

[[sources]]
id = "domain-db"
kind = "domain_db"
path = "corpus.jsonl"
reliability = 0.88
weight = 0.25
"""


def write_fixture_bundle(world: World, out_dir: str | Path) -> dict[str, Path]:
    """Write kg.tsv, aliases.tsv, corpus.jsonl, web_fixture.json, vocab.txt,
    eval.jsonl, and a ready-to-run config.toml into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(world.spec.seed + 1)

    paths = {
        "kg": out / "kg.tsv",
        "aliases": out / "aliases.tsv",
        "corpus": out / "corpus.jsonl",
        "web": out / "web_fixture.json",
        "vocab": out / "vocab.txt",
        "eval": out / "eval.jsonl",
        "config": out / "config.toml",
    }
    paths["kg"].write_text("\n".join(_kg_rows(world.facts)) + "\n", encoding="utf-8")
    paths["aliases"].write_text(
        "".join(f"{cid}\t{kind}\t{alias}\n" for cid, kind, alias in world.aliases),
        encoding="utf-8",
    )
    paths["corpus"].write_text(
        "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in _corpus_rows(world.facts, rng)),
        encoding="utf-8",
    )
    paths["web"].write_text(
        json.dumps({"delay_ms": 0, "entries": _web_entries(world.facts, rng)}, indent=2),
        encoding="utf-8",
    )
    paths["vocab"].write_text(DEFAULT_VOCAB, encoding="utf-8")
    save_corpus(world.examples, paths["eval"])
    paths["config"].write_text(
        _CONFIG_TEMPLATE.format(web_endpoint=world.spec.web_endpoint), encoding="utf-8"
    )
    return paths
