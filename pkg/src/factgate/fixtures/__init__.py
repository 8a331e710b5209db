"""Bundled fixture data: the Einstein worked example (knowledge graph,
document corpus, and web-search replay hits) with a ready-made pipeline
configuration, used by the test suite, the acceptance gate, and the README
walkthrough."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

EINSTEIN_CONFIG_TEMPLATE = """\
[pipeline]
tau_confidence = 0.7
evidence_budget_ms = 800
deterministic_output = false

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
alias_file = "{aliases}"

[correction.attribution_labels]
kg-main = "the knowledge graph"
web-search = "web sources"
domain-db = "the document archive"

[[sources]]
id = "kg-main"
kind = "knowledge_graph"
path = "{kg}"
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
path = "{corpus}"
reliability = 0.88
weight = 0.25
"""


def einstein_dir() -> Path:
    return Path(resources.files("factgate")) / "fixtures" / "einstein"


def web_fixture_path() -> Path:
    return einstein_dir() / "web_hits.json"


def write_einstein_config(
    out_path: str | Path, web_endpoint: str = "http://127.0.0.1:8099/search"
) -> Path:
    """Render the Einstein pipeline config with absolute fixture paths and
    the given web endpoint (point it at a running MockKnowledgeServer)."""
    fixture = einstein_dir()
    out = Path(out_path)
    out.write_text(
        EINSTEIN_CONFIG_TEMPLATE.format(
            aliases=fixture / "aliases.tsv",
            kg=fixture / "kg.tsv",
            corpus=fixture / "corpus.jsonl",
            web_endpoint=web_endpoint,
        ),
        encoding="utf-8",
    )
    return out
