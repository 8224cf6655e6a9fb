"""Experiment matrices: run grids of training configs, aggregate results.

A sweep is the cartesian product of code kinds, qubit counts, layer
counts, target widths and dataset seeds.  Each cell writes its artifacts
into its own directory named after the cell, so interrupted sweeps resume
by skipping directories that already contain a record.
"""

from __future__ import annotations

import csv
import math
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import yaml

from .training import (
    AdamConfig,
    TrainingConfig,
    load_record,
    save_record,
    train,
)

WORKERS_ENV = "QCBM_WORKERS"


@dataclass(frozen=True)
class SweepSpec:
    codes: tuple[str, ...]
    ns: tuple[int, ...]
    layers: tuple[int, ...]
    nus: tuple[float, ...]
    dataset_seeds: tuple[int, ...]
    dataset_kind: str = "centered_gaussian"
    dataset_size: int = 256
    epochs: int = 100
    shots: int = 256
    bandwidths: tuple[float, ...] = (0.003, 0.01, 0.03, 0.1, 0.3)
    learning_rate: float = 0.05

    def __post_init__(self):
        for name in ("codes", "ns", "layers", "nus", "dataset_seeds"):
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name!r} is empty")

    def cells(self) -> list[TrainingConfig]:
        configs = []
        for code in self.codes:
            for n in self.ns:
                for L in self.layers:
                    for nu in self.nus:
                        for seed in self.dataset_seeds:
                            configs.append(
                                TrainingConfig(
                                    code=code,
                                    n=n,
                                    layers=L,
                                    epochs=self.epochs,
                                    shots=self.shots,
                                    dataset_kind=self.dataset_kind,
                                    nu=nu,
                                    dataset_size=self.dataset_size,
                                    dataset_seed=seed,
                                    init_seed=seed + 1,
                                    shots_seed=seed + 2,
                                    bandwidths=tuple(self.bandwidths),
                                    adam=AdamConfig(learning_rate=self.learning_rate),
                                )
                            )
        return configs


def load_spec(path: str | Path) -> SweepSpec:
    raw = yaml.safe_load(Path(path).read_text())
    return spec_from_dict(raw)


def spec_from_dict(raw: dict) -> SweepSpec:
    known = {f.name for f in SweepSpec.__dataclass_fields__.values()}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown sweep spec fields: {sorted(unknown)}")
    for axis in ("codes", "ns", "layers", "nus", "dataset_seeds", "bandwidths"):
        if axis in raw:
            raw[axis] = tuple(raw[axis])
    return SweepSpec(**raw)


def run_name(config: TrainingConfig) -> str:
    return (
        f"{config.code}_n{config.n}_L{config.layers}"
        f"_nu{config.nu:g}_seed{config.dataset_seed}"
    )


def _run_cell(args: tuple[TrainingConfig, str]) -> tuple[str, str | None]:
    config, out_dir = args
    name = run_name(config)
    try:
        record = train(config)
        save_record(record, Path(out_dir) / name)
        return name, None
    except Exception:
        return name, traceback.format_exc()


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(
    spec: SweepSpec, out_dir: str | Path, workers: int | None = None
) -> tuple[int, int, list[tuple[str, str]]]:
    """Execute all missing cells; returns (completed, skipped, failures)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pending = []
    skipped = 0
    for config in spec.cells():
        if (out_dir / run_name(config) / "record.json").exists():
            skipped += 1
        else:
            pending.append((config, str(out_dir)))

    failures: list[tuple[str, str]] = []
    workers = workers or default_workers()
    if workers == 1:
        results = [_run_cell(item) for item in pending]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, pending))
    for name, error in results:
        if error is not None:
            failures.append((name, error))

    write_results_csv(out_dir)
    if failures:
        with open(out_dir / "failures.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["run", "error"])
            writer.writerows(failures)
    return len(pending) - len(failures), skipped, failures


RESULT_COLUMNS = (
    "code", "n", "L", "nu", "seed", "q", "final_loss", "reference",
    "epochs_to_reference",
)


def _report_row(record: dict) -> dict:
    cfg = record["config"]
    losses = record["losses"]
    reference = record["reference"]
    to_ref = next(
        (epoch for epoch, loss in enumerate(losses) if loss <= 2.0 * reference), ""
    )
    return {
        "code": cfg["code"],
        "n": cfg["n"],
        "L": cfg["layers"],
        "nu": cfg["nu"],
        "seed": cfg["dataset_seed"],
        "q": record["q"],
        "final_loss": losses[-1],
        "reference": reference,
        "epochs_to_reference": to_ref,
    }


def collect_records(out_dir: str | Path) -> list[dict]:
    run_dirs = sorted(p for p in Path(out_dir).iterdir() if (p / "record.json").exists())
    return [load_record(p) for p in run_dirs]


def write_results_csv(out_dir: str | Path) -> Path:
    """Assemble the master CSV, one row per completed run."""
    out_dir = Path(out_dir)
    rows = [_report_row(record) for record in collect_records(out_dir)]
    path = out_dir / "results.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return path


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    if len(values) < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var / len(values))


def _gmean_stderr(values: list[float]) -> tuple[float, float]:
    """Geometric mean of Q across runs, stderr via the delta method.

    Q is a geometric mean over epochs, so cells aggregate the same way;
    the error is gmean * stderr(log Q).
    """
    logs = [math.log(v) for v in values]
    mean_log, err_log = _mean_stderr(logs)
    gmean = math.exp(mean_log)
    return gmean, gmean * err_log


def write_report(out_dir: str | Path) -> dict[str, Path]:
    """Emit figure-data CSVs from a completed results directory.

    - epoch_curves.csv: mean/stderr of the loss per epoch per cell
    - q_by_qubits.csv: geometric mean/stderr of Q per (code, n, L, nu)
    - q_by_width.csv:  geometric mean/stderr of Q per (code, nu, L, n)
    - wins.csv: per (n, L, nu) cell, the code with the lowest geometric
      mean Q, plus a summary fraction of cells won by the reflected Gray
      code
    """
    out_dir = Path(out_dir)
    records = collect_records(out_dir)
    if not records:
        raise FileNotFoundError(f"no results under {out_dir}")

    by_cell: dict[tuple, list[dict]] = {}
    for record in records:
        cfg = record["config"]
        key = (cfg["code"], cfg["n"], cfg["layers"], cfg["nu"])
        by_cell.setdefault(key, []).append(record)

    paths = {}

    epoch_path = out_dir / "epoch_curves.csv"
    with open(epoch_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "n", "L", "nu", "epoch", "mean_mmd2", "stderr_mmd2"])
        for (code, n, L, nu), group in sorted(by_cell.items()):
            epochs = len(group[0]["losses"])
            for epoch in range(epochs):
                mean, err = _mean_stderr([r["losses"][epoch] for r in group])
                writer.writerow([code, n, L, nu, epoch, repr(mean), repr(err)])
    paths["epoch_curves"] = epoch_path

    def q_table(path: Path, order: str) -> Path:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["code", "n", "L", "nu", "mean_q", "stderr_q", "runs"])
            keys = sorted(
                by_cell,
                key=(lambda k: (k[0], k[1], k[2], k[3]))
                if order == "n"
                else (lambda k: (k[0], k[3], k[2], k[1])),
            )
            for key in keys:
                group = by_cell[key]
                mean, err = _gmean_stderr([r["q"] for r in group])
                writer.writerow([key[0], key[1], key[2], key[3], repr(mean), repr(err), len(group)])
        return path

    paths["q_by_qubits"] = q_table(out_dir / "q_by_qubits.csv", "n")
    paths["q_by_width"] = q_table(out_dir / "q_by_width.csv", "nu")

    wins_path = out_dir / "wins.csv"
    cells: dict[tuple, dict[str, float]] = {}
    for (code, n, L, nu), group in by_cell.items():
        cells.setdefault((n, L, nu), {})[code] = _gmean_stderr([r["q"] for r in group])[0]
    rgc_wins = 0
    with open(wins_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "L", "nu", "best_code", "best_mean_q"])
        for (n, L, nu), scores in sorted(cells.items()):
            best = min(scores, key=scores.get)
            rgc_wins += best == "rgc"
            writer.writerow([n, L, nu, best, repr(scores[best])])
        writer.writerow([])
        writer.writerow(["rgc_wins", rgc_wins, "cells", len(cells),
                         "fraction", repr(rgc_wins / len(cells))])
    paths["wins"] = wins_path
    return paths
