"""`verify` command-line interface.

Subcommands: serve (HTTP service), run (batch verification over JSONL),
calibrate (ensemble-weight learning), ablate (source-subset evaluation),
mock-server (fixture-replay knowledge endpoint), gen-corpus (synthetic
evaluation bundle), bench-kernels (compiled vs fallback timing).
"""

from __future__ import annotations

import json
import statistics
import sys
import time
from pathlib import Path

import click

from factgate.pipeline.config import ConfigInvalid, load_config
from factgate.pipeline.jsonio import stable_dumps
from factgate.pipeline.orchestrator import Pipeline


@click.group()
def main():
    """Real-time fact verification middleware."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--bind", default=None, help="host:port (default from config)")
def serve(config_path, bind):
    """Run the HTTP verification service."""
    from factgate.pipeline.service import serve as run_service

    try:
        run_service(config_path, bind)
    except ConfigInvalid as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
def run(config_path, input_path, output_path):
    """Verify a JSON-lines batch: {"text": ...} per line; one
    VerifiedResponse JSON per output line."""
    try:
        pipeline = Pipeline.from_config_file(config_path)
    except ConfigInvalid as exc:
        raise click.ClickException(str(exc)) from exc

    e_scores: list[float] = []
    latencies: list[float] = []
    corrections = 0
    errors: list[tuple[int, str]] = []
    deterministic = pipeline.config.deterministic_output

    with open(input_path, encoding="utf-8") as src, open(output_path, "w", encoding="utf-8") as dst:
        for lineno, line in enumerate(src, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                text = row["text"] if isinstance(row, dict) else row
                if not isinstance(text, str):
                    raise ValueError("'text' must be a string")
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                errors.append((lineno, str(exc)))
                continue
            result = pipeline.verify(text)
            dst.write(stable_dumps(result.to_dict(deterministic=deterministic)) + "\n")
            e_scores.append(result.e_score)
            latencies.append(result.timings.get("total_ms", 0.0))
            if not result.rolled_back:
                corrections += len(result.corrections)

    click.echo(f"verified: {len(e_scores)}")
    click.echo(f"corrections: {corrections}")
    if e_scores:
        click.echo(f"mean e_score: {statistics.fmean(e_scores):.6g}")
        latencies.sort()
        p50 = latencies[len(latencies) // 2]
        p95 = latencies[min(len(latencies) - 1, int(0.95 * len(latencies)))]
        click.echo(f"latency ms: p50={p50:.6g} p95={p95:.6g}")
    for lineno, message in errors:
        click.echo(f"error: line {lineno}: {message}", err=True)
    if errors:
        click.echo(f"failed lines: {len(errors)}", err=True)


@main.command()
@click.option("--val", "val_path", required=True, type=click.Path(exists=True),
              help="JSONL of {intrinsic, external, coherence, correct}")
@click.option("--grid-step", default=0.05, show_default=True)
@click.option("--bins", default=15, show_default=True)
@click.option("--tau", default=0.7, show_default=True)
@click.option("--reliability-csv", default=None, type=click.Path(),
              help="write the reliability diagram of the learned ensemble")
def calibrate(val_path, grid_step, bins, tau, reliability_csv):
    """Learn (alpha, beta, gamma) minimizing ECE on a validation set."""
    from factgate.confidence.calibration import expected_calibration_error, learn_weights
    from factgate.confidence.scoring import combine_confidence

    samples = []
    for lineno, line in enumerate(Path(val_path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            samples.append(
                ((float(row["intrinsic"]), float(row["external"]), float(row["coherence"])),
                 bool(row["correct"]))
            )
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise click.ClickException(f"line {lineno}: {exc}") from exc
    if not samples:
        raise click.ClickException("validation set is empty")

    weights = learn_weights(samples, grid_step=grid_step, bins=bins, tau=tau)
    predictions = [
        (combine_confidence(c[0], c[1], c[2], weights), ok) for c, ok in samples
    ]
    report = expected_calibration_error(predictions, bins=bins)
    click.echo(stable_dumps({
        "alpha": weights[0], "beta": weights[1], "gamma": weights[2],
        "ece": report.ece, "samples": len(samples),
    }))
    if reliability_csv:
        Path(reliability_csv).write_text(report.to_csv(), encoding="utf-8")
        click.echo(f"reliability diagram written to {reliability_csv}", err=True)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--subsets", default="kg|web|db|kg+web|kg+db|web+db|all", show_default=True,
              help="pipe-separated source subsets")
@click.option("--out-csv", default=None, type=click.Path())
@click.option("--out-json", default=None, type=click.Path())
def ablate(config_path, corpus_path, subsets, out_csv, out_json):
    """Evaluate the corpus once per source subset (ablation matrix)."""
    from factgate.evalharness.harness import UnknownSource, ablate as run_ablation
    from factgate.evalharness.harness import ablation_csv, load_corpus

    try:
        config = load_config(config_path)
        corpus = load_corpus(corpus_path)
        rows = run_ablation(config, corpus, [s for s in subsets.split("|") if s.strip()])
    except (ConfigInvalid, UnknownSource, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    csv_text = ablation_csv(rows)
    click.echo(csv_text, nl=False)
    if out_csv:
        Path(out_csv).write_text(csv_text, encoding="utf-8")
    if out_json:
        Path(out_json).write_text(
            stable_dumps([row.to_dict() for row in rows]) + "\n", encoding="utf-8"
        )


@main.command("mock-server")
@click.option("--fixtures", required=True, type=click.Path(exists=True))
@click.option("--port", default=8099, show_default=True)
@click.option("--delay-ms", default=None, type=float, help="override fixture delay")
def mock_server(fixtures, port, delay_ms):
    """Serve fixture web-search responses (blocks until interrupted)."""
    from factgate.sources.mockserver import MockKnowledgeServer

    server = MockKnowledgeServer(fixtures, delay_ms=delay_ms, port=port).start()
    click.echo(f"mock knowledge server on {server.url}")
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()


@main.command("gen-corpus")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=7, show_default=True)
@click.option("--people", default=8, show_default=True)
@click.option("--towers", default=6, show_default=True)
@click.option("--hallucination-rate", default=0.5, show_default=True)
@click.option("--web-endpoint", default="http://127.0.0.1:8099/search", show_default=True)
def gen_corpus(out_dir, seed, people, towers, hallucination_rate, web_endpoint):
    """Generate a self-contained synthetic evaluation bundle."""
    from factgate.evalharness.synthesis import SynthesisSpec, generate_world, write_fixture_bundle

    spec = SynthesisSpec(
        seed=seed, n_people=people, n_towers=towers,
        hallucination_rate=hallucination_rate, web_endpoint=web_endpoint,
    )
    world = generate_world(spec)
    paths = write_fixture_bundle(world, out_dir)
    click.echo(f"examples: {len(world.examples)}  facts: {len(world.facts)}")
    for name, path in paths.items():
        click.echo(f"{name}: {path}")


@main.command("bench-kernels")
@click.option("--n", default=100_000, show_default=True)
@click.option("--grid-step", default=0.05, show_default=True)
@click.option("--repeat", default=3, show_default=True)
def bench_kernels(n, grid_step, repeat):
    """Time the compiled calibration kernels against the numpy fallback."""
    import numpy as np

    from factgate.confidence.backend import get_kernels

    rng = np.random.default_rng(12345)
    intrinsic = rng.random(n)
    external = rng.random(n)
    coherence = rng.random(n)
    correct = (rng.random(n) < external).astype(np.float64)
    m = round(1.0 / grid_step)

    click.echo(f"n={n} grid_points={(m + 1) * (m + 2) // 2} repeat={repeat}")
    results = {}
    for backend in ("cython", "python"):
        try:
            kernels = get_kernels(backend)
        except ImportError:
            click.echo(f"{backend:>7}: unavailable")
            continue

        def once(k=kernels):
            start = time.perf_counter()
            k.grid_scores(intrinsic, external, coherence, correct, m, 15, 0.7)
            return time.perf_counter() - start

        best = min(once() for _ in range(repeat))
        results[backend] = best
        click.echo(f"{backend:>7}: grid_scores {best * 1000:.1f} ms")
    if len(results) == 2:
        click.echo(f"speedup: {results['python'] / results['cython']:.2f}x")


if __name__ == "__main__":
    main()
