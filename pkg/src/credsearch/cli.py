"""`credsearch` command line: simulator, sync service, combined
sync+API server, and the load benchmark."""
from __future__ import annotations

import logging
import os
import sys

import click

from .bench import BenchConfig, TargetUnreachable, run_bench
from .simgen import GeneratorConfig, generate
from .simserver import SimSource, run_sim_server
from .sync import SyncService


def _env_override(value, env_name):
    # CREDSEARCH_* environment variables take precedence over flags
    return os.environ.get(env_name, value)


@click.group()
def main() -> None:
    """Full-text search over verifiable-credential metadata ledgers."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s %(message)s")


@main.command()
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--orgs", default=10, show_default=True, type=int)
@click.option("--schemas", default=20, show_default=True, type=int)
@click.option("--claim-defs-per-schema", default=2, show_default=True, type=int)
@click.option("--count", default=None, type=int, help="Generate exactly N transactions using the default type mix.")
@click.option("--port", default=9700, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--mutable", is_flag=True, help="Enable POST /txns (testing hook).")
def sim(seed, orgs, schemas, claim_defs_per_schema, count, port, host, mutable) -> None:
    """Serve a deterministic synthetic ledger over HTTP."""
    cfg = GeneratorConfig(
        seed=seed, n_orgs=orgs, n_schemas=schemas,
        claim_defs_per_schema=claim_defs_per_schema, count=count,
    )
    ledger = generate(cfg)
    click.echo(f"generated {ledger.size} transactions, root {ledger.root().hex()}")
    run_sim_server(SimSource(ledger, mutable=mutable), port=port, host=host)


@main.command()
@click.option("--ledger-url", required=False)
@click.option("--data-dir", required=False)
@click.option("--poll-interval", default=10.0, show_default=True, type=float)
@click.option("--batch-size", default=1000, show_default=True, type=int)
def sync(ledger_url, data_dir, poll_interval, batch_size) -> None:
    """Maintain a verified local ledger copy (no API server)."""
    ledger_url = _env_override(ledger_url, "CREDSEARCH_LEDGER_URL")
    data_dir = _env_override(data_dir, "CREDSEARCH_DATA_DIR")
    if not ledger_url or not data_dir:
        raise click.UsageError("--ledger-url and --data-dir (or CREDSEARCH_* env vars) are required")
    service = SyncService(data_dir, ledger_url, poll_interval=poll_interval, batch_size=batch_size)
    click.echo(f"syncing {ledger_url} into {data_dir} (last_seq={service.last_seq})")
    try:
        service.poll_loop()
    except KeyboardInterrupt:
        pass
    if service.phase == "fatal":
        click.echo(f"FATAL: {service.fatal_reason}", err=True)
        sys.exit(1)


@main.command()
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ledger-url", required=False)
@click.option("--data-dir", required=False)
@click.option("--poll-interval", default=10.0, show_default=True, type=float)
@click.option("--batch-size", default=1000, show_default=True, type=int)
@click.option("--no-cors", is_flag=True, help="Disable permissive CORS headers.")
@click.option("--ui-dir", default=None, help="Serve web UI static assets from this directory.")
def serve(port, host, ledger_url, data_dir, poll_interval, batch_size, no_cors, ui_dir) -> None:
    """Run sync and the query API in one process."""
    from .api import create_app, run_api_server

    ledger_url = _env_override(ledger_url, "CREDSEARCH_LEDGER_URL")
    data_dir = _env_override(data_dir, "CREDSEARCH_DATA_DIR")
    if not ledger_url or not data_dir:
        raise click.UsageError("--ledger-url and --data-dir (or CREDSEARCH_* env vars) are required")
    service = SyncService(data_dir, ledger_url, poll_interval=poll_interval, batch_size=batch_size)
    service.start()
    app = create_app(service, cors=not no_cors, ui_dir=ui_dir)
    try:
        run_api_server(app, port=port, host=host)
    finally:
        service.stop()


@main.command()
@click.option("--url", required=True)
@click.option("--connections", default=400, show_default=True, type=int)
@click.option("--duration", default=30.0, show_default=True, type=float, help="Seconds per query class.")
@click.option("--out", default=None, help="Write per-class results as CSV.")
@click.option("--data-dir", default=None, help="Ledger copy for semantic validation of sampled responses.")
def bench(url, connections, duration, out, data_dir) -> None:
    """Replay the five query classes and report throughput per class."""
    config = BenchConfig(
        target_url=url, connections=connections, duration=duration, data_dir=data_dir
    )
    try:
        report = run_bench(config)
    except TargetUnreachable as exc:
        click.echo(f"target unreachable: {exc}", err=True)
        sys.exit(2)
    click.echo(report.table())
    if out:
        report.write_csv(out)
        click.echo(f"wrote {out}")
    if not report.passed:
        click.echo("FAILED: non-zero errors or semantic mismatches", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
