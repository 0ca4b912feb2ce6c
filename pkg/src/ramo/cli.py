"""Command line interface: ingest, build-index, serve, ask, bench.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .baseline import compare_latency
from .catalog import load_catalog_with_stats, save_catalog
from .config import ServiceConfig, load_config, split_listen_address
from .errors import RamoError
from .service import build_pipeline, create_app
from .vecindex import save_index


def _config_from(ctx: click.Context, **flag_overrides) -> ServiceConfig:
    overrides = dict(ctx.obj.get("overrides", {}))
    overrides.update({k: v for k, v in flag_overrides.items() if v is not None})
    return load_config(path=ctx.obj.get("config_path"), overrides=overrides)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Config file ([section] key=value); flags and RAMO_* env vars override it.")
@click.pass_context
def cli(ctx: click.Context, config_path: str | None):
    """Retrieval-augmented course recommender."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["overrides"] = {}


@cli.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write the cleaned catalog CSV here.")
@click.option("--header", "headers", multiple=True, metavar="FIELD=NAME",
              help="Override a column header, e.g. --header rating='Rating'.")
def ingest(csv_path: str, out: str | None, headers: tuple[str, ...]):
    """Load, clean, and deduplicate a course CSV; print row counts."""
    header_map = {}
    for item in headers:
        field, sep, name = item.partition("=")
        if not sep:
            raise click.UsageError(f"--header expects FIELD=NAME, got {item!r}")
        header_map[field.strip()] = name.strip()
    try:
        catalog, stats = load_catalog_with_stats(csv_path, header_map or None)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(f"rows={stats.rows} deduped={stats.deduped}")
    if stats.dropped_empty_name:
        click.echo(f"dropped_empty_name={stats.dropped_empty_name}")
    click.echo(f"fingerprint={catalog.source_fingerprint}")
    if out:
        save_catalog(catalog, out)
        click.echo(f"wrote {out}")


@cli.command("build-index")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None, help="Index file (default: <catalog>.ramoidx).")
@click.option("--embedder", "embedder_kind", type=click.Choice(["deterministic", "remote"]), default=None)
@click.option("--dim", "embed_dim", type=int, default=None)
@click.pass_context
def build_index_cmd(ctx, catalog_path, out, embedder_kind, embed_dim):
    """Embed every course and write the vector index."""
    config = _config_from(ctx, catalog_path=catalog_path, embedder_kind=embedder_kind,
                          embed_dim=embed_dim)
    pipeline = build_pipeline(config)
    out = out or str(Path(config.catalog_path).with_suffix(".ramoidx"))
    with open(out, "wb") as fh:
        save_index(pipeline.index, fh)
    click.echo(f"indexed {len(pipeline.index)} courses (dim={pipeline.index.dim}) -> {out}")


@cli.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP JSON service."""
    import uvicorn

    config = _config_from(ctx)
    listen_host, listen_port = split_listen_address(config.listen_address)
    pipeline = build_pipeline(config)
    app = create_app(config, pipeline)
    click.echo(
        f"serving {len(pipeline.catalog)} courses on "
        f"{host or listen_host}:{port or listen_port}"
    )
    uvicorn.run(app, host=host or listen_host, port=port or listen_port, log_level="info")


@cli.command()
@click.argument("message")
@click.option("--template", "template_id", default=None, help="Template id from the template dir.")
@click.option("--top-k", type=int, default=None)
@click.pass_context
def ask(ctx, message, template_id, top_k):
    """One-shot question through the full pipeline; prints the reply."""
    from .recommender import new_session

    config = _config_from(ctx, template_id=template_id, top_k=top_k)
    pipeline = build_pipeline(config)
    response = pipeline.recommender.recommend(new_session(), message)
    click.echo(response.reply)
    click.echo(
        f"[source={response.source} embed={response.latency.embed_ms:.1f}ms "
        f"search={response.latency.search_ms:.1f}ms generate={response.latency.generate_ms:.1f}ms]",
        err=True,
    )


@cli.command()
@click.option("--queries", "queries_path", type=click.Path(exists=True), required=True,
              help="Text file with one query per line.")
@click.option("--reps", type=int, default=10, show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--csv", "as_csv", is_flag=True, help="Emit CSV instead of the aligned table.")
@click.pass_context
def bench(ctx, queries_path, reps, k, as_csv):
    """Compare RAG and TF-IDF baseline latency per query (medians)."""
    queries = [q.strip() for q in Path(queries_path).read_text(encoding="utf-8").splitlines() if q.strip()]
    if not queries:
        raise click.UsageError(f"no queries in {queries_path}")
    config = _config_from(ctx)
    pipeline = build_pipeline(config, with_baseline=True)
    assert pipeline.baseline is not None
    report = compare_latency(queries, pipeline.recommender, pipeline.baseline, reps, k=k)
    click.echo(report.to_csv() if as_csv else report.to_text())


def main(argv: list[str] | None = None) -> int:
    """Run the CLI with the documented exit-code contract."""
    try:
        cli.main(args=argv, prog_name="ramo", standalone_mode=False)
    except click.exceptions.Exit as exc:  # e.g. --help
        return exc.exit_code
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except RamoError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
