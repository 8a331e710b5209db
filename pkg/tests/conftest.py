"""Shared fixtures: the bundled worked example (KG + mock web + corpus)
wired into a live pipeline, and a generated synthetic evaluation bundle."""

from __future__ import annotations

import pytest

from factgate.evalharness.synthesis import SynthesisSpec, generate_world, write_fixture_bundle
from factgate.fixtures import web_fixture_path, write_einstein_config
from factgate.pipeline.orchestrator import Pipeline
from factgate.sources.mockserver import MockKnowledgeServer

EINSTEIN_INPUT = "Einstein published relativity in 1920"
EINSTEIN_OUTPUT = "Einstein published special relativity in 1905 and general relativity in 1915"


@pytest.fixture(scope="session")
def einstein_server():
    with MockKnowledgeServer(web_fixture_path()) as server:
        yield server


@pytest.fixture(scope="session")
def einstein_config_path(tmp_path_factory, einstein_server):
    out = tmp_path_factory.mktemp("einstein") / "config.toml"
    return write_einstein_config(out, einstein_server.url)


@pytest.fixture(scope="session")
def einstein_pipeline(einstein_config_path):
    return Pipeline.from_config_file(einstein_config_path)


@pytest.fixture(scope="session")
def synth_bundle(tmp_path_factory):
    """Generated world with its own mock web server; yields the bundle
    directory containing config.toml and eval.jsonl."""
    out_dir = tmp_path_factory.mktemp("synth")
    world = generate_world(SynthesisSpec(seed=7, n_people=6, n_towers=5))
    paths = write_fixture_bundle(world, out_dir)
    with MockKnowledgeServer(paths["web"]) as server:
        config_text = paths["config"].read_text(encoding="utf-8").replace(
            "http://127.0.0.1:8099/search", server.url
        )
        paths["config"].write_text(config_text, encoding="utf-8")
        yield paths
