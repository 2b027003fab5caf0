"""Command line entry points: extract, score, replay, grid, serve, bench."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .corpus import parse_corpus, to_idea_text
from .extraction import extract_terms
from .lingua import Dictionaries, default_dict_dir
from .scoring import FileTrendProvider, ScopeWeights, feature_vector, measure_idea


@click.group()
def main():
    """Idea screening toolkit: extraction, scoring, replay, serving."""


def _echo_errors(errors) -> None:
    for err in errors:
        click.echo(f"error: record {err.record_id}: {err.message}", err=True)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--dicts", "dict_dir", type=click.Path(exists=True), default=None,
              help="Dictionary directory (defaults to the packaged fixtures).")
@click.option("--pretagged", is_flag=True,
              help="Require the pretagged_title channel on every record.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def extract(corpus_path, dict_dir, pretagged, out_path):
    """Emit per-idea request/known terms as JSON lines."""
    dicts = Dictionaries.load(dict_dir)
    result = parse_corpus(corpus_path)
    _echo_errors(result.errors)
    sink = open(out_path, "w", encoding="utf-8") if out_path else sys.stdout
    try:
        for record in result.records:
            if pretagged and not record.pretagged_title:
                click.echo(f"error: record {record.id}: no pretagged_title", err=True)
                continue
            try:
                terms = extract_terms(to_idea_text(record, dicts), dicts)
            except ValueError as exc:
                click.echo(f"error: record {record.id}: {exc}", err=True)
                continue
            sink.write(json.dumps({
                "id": record.id,
                "rt": terms.request_surfaces(),
                "kt": terms.known_surfaces(),
            }) + "\n")
    finally:
        if out_path:
            sink.close()


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--trends", "trend_path", type=click.Path(exists=True), default=None)
@click.option("--dicts", "dict_dir", type=click.Path(exists=True), default=None)
@click.option("--scope-setting", type=click.Choice(["1", "2", "3"]), default="1")
@click.option("--seed", type=int, default=42, help="Seed for scope settings 2 and 3.")
@click.option("--trend-window", "-d", type=int, default=1)
@click.option("--missing-trend", type=click.Choice(["error", "zero"]), default="zero")
@click.option("--out", "out_path", type=click.Path(), default=None)
def score(corpus_path, trend_path, dict_dir, scope_setting, seed, trend_window,
          missing_trend, out_path):
    """Emit per-idea measurements and feature vectors as JSON lines."""
    import numpy as np

    dicts = Dictionaries.load(dict_dir)
    provider = FileTrendProvider.load(trend_path or default_dict_dir() / "trends.csv")
    setting = int(scope_setting)
    rng = np.random.default_rng(seed) if setting != 1 else None
    weights = ScopeWeights(dicts, setting=setting, rng=rng)
    result = parse_corpus(corpus_path)
    _echo_errors(result.errors)
    sink = open(out_path, "w", encoding="utf-8") if out_path else sys.stdout
    try:
        for record in result.records:
            try:
                terms = extract_terms(to_idea_text(record, dicts), dicts)
                m = measure_idea(record, terms, provider, weights,
                                 d=trend_window, missing_trend=missing_trend)
            except (ValueError, LookupError) as exc:
                click.echo(f"error: record {record.id}: {exc}", err=True)
                continue
            sink.write(json.dumps({
                "id": record.id,
                "rel": m.rel, "vote": m.vote, "type": m.type,
                "div": m.div, "con": m.con, "epr": m.epr,
                "x": list(feature_vector(m)),
                "label": record.label().value if record.label() is not None else None,
            }) + "\n")
    finally:
        if out_path:
            sink.close()


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--eps", type=float, required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--theta", type=int, required=True)
@click.option("--trials", type=int, default=30)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--timing/--no-timing", default=True,
              help="--no-timing makes reruns byte-identical.")
def replay(data_path, eps, alpha, theta, trials, seed, out_dir, timing):
    """Run seeded trials of one hyperparameter cell over a dataset."""
    from .experiments import GridCell, load_dataset, run_grid, write_grid_report

    data = load_dataset(data_path)
    cell = GridCell(eps, alpha, theta, 0)
    reports = run_grid(data, [cell], trials=trials, seed=seed)
    summary = reports[0].summary()
    click.echo(json.dumps(summary, indent=2, sort_keys=True))
    if out_dir:
        paths = write_grid_report(reports, out_dir, include_timing=timing)
        click.echo(f"wrote {paths['trials']}, {paths['cells']}, {paths['json']}", err=True)


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--trials", type=int, default=30)
@click.option("--seed", type=int, default=0)
@click.option("--timing/--no-timing", default=True)
def grid(data_path, out_dir, trials, seed, timing):
    """Run the full 75-cell hyperparameter grid and write reports."""
    from .experiments import full_grid, load_dataset, run_grid, write_grid_report

    data = load_dataset(data_path)
    reports = run_grid(data, full_grid(), trials=trials, seed=seed)
    paths = write_grid_report(reports, out_dir, include_timing=timing)
    click.echo(f"wrote {paths['trials']}, {paths['cells']}, {paths['json']}")


@main.command()
@click.option("--listen", default="127.0.0.1:8000", help="host:port")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--dict-dir", type=click.Path(exists=True), default=None)
@click.option("--trend-file", type=click.Path(exists=True), default=None)
@click.option("--epsilon", type=float, default=0.5)
@click.option("--sigma", type=float, default=1e-4)
@click.option("--eta0", type=float, default=0.01)
@click.option("--delta", type=float, default=10.0)
@click.option("--alpha", type=float, default=1.0)
@click.option("--theta", type=int, default=100)
@click.option("--seed", type=int, default=42)
@click.option("--snapshot-interval", type=int, default=5)
@click.option("--token", default=None, envvar="IDEASCREEN_TOKEN")
def serve(listen, data_dir, dict_dir, trend_file, epsilon, sigma, eta0, delta,
          alpha, theta, seed, snapshot_interval, token):
    """Run the HTTP service."""
    import uvicorn

    from .olr import HyperParams
    from .service import ServiceConfig, create_app

    host, _, port = listen.partition(":")
    config = ServiceConfig(
        data_dir=Path(data_dir),
        dict_dir=Path(dict_dir) if dict_dir else None,
        trend_file=Path(trend_file) if trend_file else None,
        hyper=HyperParams(epsilon=epsilon, sigma=sigma, eta0=eta0, delta=delta,
                          alpha=alpha, theta=theta),
        seed=seed,
        snapshot_interval=snapshot_interval,
        token=token,
    )
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or 8000))


@main.command()
@click.option("--n", type=int, default=241)
@click.option("--dim", type=int, default=7)
@click.option("--sweeps", type=int, default=200)
@click.option("--repeats", type=int, default=3)
def bench(n, dim, sweeps, repeats):
    """Compare the pure-Python and compiled kernels."""
    from .bench import format_report, run_benchmark

    rows = run_benchmark(n=n, dim=dim, sweeps=sweeps, repeats=repeats)
    click.echo(format_report(rows, n, dim, sweeps))


if __name__ == "__main__":
    main()
