"""Command-line front end.

Subcommands: ``codes table``, ``codes check``, ``train``, ``sweep`` and
``report``.  Training configs and sweep specs are YAML files; every field
has a default, so a 5-line config reproduces a single experiment cell.
"""

from __future__ import annotations

import importlib.resources
import sys
from pathlib import Path

import click
import yaml

from . import sweep as sweep_mod
from .codes import check_code_properties, render_code_table
from .training import AdamConfig, TrainingConfig, save_record, train as run_training

PRESETS = (
    "gaussian-mini", "mixture-mini", "sawtooth-mini",
    "gaussian-full", "mixture-full", "sawtooth-full",
)


@click.group()
def main() -> None:
    """Train Born machines on numerical data under different binary codes."""


@main.group()
def codes() -> None:
    """Inspect and verify the binary codes."""


@codes.command("table")
@click.option("--n", type=int, required=True, help="Bit count (1..8).")
def codes_table(n: int) -> None:
    """Print the standard, reflected Gray and monotone Gray code tables."""
    try:
        click.echo(render_code_table(n))
    except ValueError as exc:
        raise click.ClickException(str(exc))


@codes.command("check")
@click.option("--n-max", type=int, default=16, show_default=True)
@click.option("--rc-seed", type=int, default=0, show_default=True,
              help="Seed for the random-code bijectivity check.")
def codes_check(n_max: int, rc_seed: int) -> None:
    """Run the exhaustive code property suite for n = 1..n-max."""
    try:
        report, failures = check_code_properties(n_max, rc_seed=rc_seed)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    for line in report:
        click.echo(line)
    if failures:
        raise click.ClickException(f"{len(failures)} property check(s) failed")
    click.echo(f"all checks passed for n <= {n_max}")


def config_from_dict(raw: dict) -> TrainingConfig:
    """Build a TrainingConfig from a parsed YAML mapping, naming bad fields."""
    raw = dict(raw)
    adam_raw = raw.pop("adam", {})
    adam_fields = {f for f in AdamConfig.__dataclass_fields__}
    unknown = set(adam_raw) - adam_fields
    if unknown:
        raise ValueError(f"unknown fields: {sorted('adam.' + f for f in unknown)}")
    config_fields = {f for f in TrainingConfig.__dataclass_fields__} - {"adam"}
    unknown = set(raw) - config_fields
    if unknown:
        raise ValueError(f"unknown fields: {sorted(unknown)}")
    if "bandwidths" in raw:
        raw["bandwidths"] = tuple(raw["bandwidths"])
    return TrainingConfig(adam=AdamConfig(**adam_raw), **raw)


@main.command("train")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), default="runs",
              show_default=True, help="Parent directory for the run artifacts.")
def cmd_train(config_path: str, out_dir: str) -> None:
    """Run one training cell and write record.json/losses.csv/synthetic.csv."""
    raw = yaml.safe_load(Path(config_path).read_text()) or {}
    try:
        config = config_from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise click.ClickException(f"invalid config: {exc}")
    record = run_training(config)
    run_dir = Path(out_dir) / sweep_mod.run_name(config)
    save_record(record, run_dir)
    click.echo(f"run complete: {run_dir}")
    click.echo(f"final loss {record.losses[-1]:.3e}, Q {record.q:.3e}, "
               f"reference {record.reference:.3e}")


def load_preset(name: str) -> sweep_mod.SweepSpec:
    resource = importlib.resources.files("qcbm_codes.presets") / f"{name}.yaml"
    return sweep_mod.spec_from_dict(yaml.safe_load(resource.read_text()))


@main.command("sweep")
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None)
@click.option("--preset", type=click.Choice(PRESETS), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--workers", type=int, default=None,
              help=f"Worker processes (default: ${sweep_mod.WORKERS_ENV} or core count).")
def cmd_sweep(spec_path: str | None, preset: str | None, out_dir: str, workers: int | None) -> None:
    """Run a full experiment matrix (resumable) and build the master CSV."""
    if (spec_path is None) == (preset is None):
        raise click.ClickException("provide exactly one of --spec or --preset")
    try:
        spec = load_preset(preset) if preset else sweep_mod.load_spec(spec_path)
    except (TypeError, ValueError) as exc:
        raise click.ClickException(f"invalid sweep spec: {exc}")
    completed, skipped, failures = sweep_mod.run_sweep(spec, out_dir, workers=workers)
    click.echo(f"completed {completed}, skipped {skipped} (already present), "
               f"failed {len(failures)}")
    for name, _ in failures:
        click.echo(f"FAILED {name}", err=True)
    if failures:
        sys.exit(1)


@main.command("report")
@click.option("--dir", "results_dir", type=click.Path(exists=True), required=True)
def cmd_report(results_dir: str) -> None:
    """Aggregate a results directory into figure-data CSVs."""
    try:
        paths = sweep_mod.write_report(results_dir)
    except FileNotFoundError as exc:
        raise click.ClickException(str(exc))
    for kind, path in paths.items():
        click.echo(f"{kind}: {path}")


if __name__ == "__main__":
    main()
