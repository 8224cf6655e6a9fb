"""End-to-end acceptance suite, one test per shipped guarantee.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or
``-rA``).  The three ordering criteria run the mini sweep presets; their
results are cached under ``tests/_acceptance_runs`` and reruns skip every
completed cell, so only the first invocation is slow (roughly 40 minutes
on one core).
"""

import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from qcbm_codes.cli import load_preset, main
from qcbm_codes.codes import (
    check_code_properties,
    code_stats,
    make_code,
    rc_average_neighbor_hamming,
    sc_average_neighbor_hamming,
)
from qcbm_codes.mmd import KernelConfig, mmd2, mmd2_exact
from qcbm_codes.simulator import (
    CircuitParams,
    CircuitShape,
    born_probabilities,
    build_state,
)
from qcbm_codes.sweep import collect_records, run_sweep
from qcbm_codes.target import make_space, pushforward
from qcbm_codes.training import TrainingConfig, shift_gradient, train

CACHE = Path(__file__).parent / "_acceptance_runs"

TABLE_N3 = (
    "i           0    1    2    3    4    5    6    7\n"
    "f_SC(i)   000  001  010  011  100  101  110  111\n"
    "f_RGC(i)  000  001  011  010  110  111  101  100\n"
    "f_MGC(i)  000  001  011  010  110  100  101  111"
)


def criterion(num: int, description: str, passed: bool) -> None:
    print(f"\n[criterion {num:2d}] {'PASS' if passed else 'FAIL'}: {description}")
    assert passed, f"criterion {num} failed: {description}"


def ensure_sweep(preset: str, subdir: str) -> list[dict]:
    out = CACHE / subdir
    completed, skipped, failures = run_sweep(load_preset(preset), out, workers=1)
    assert not failures, failures
    return collect_records(out)


def mean_q(records: list[dict], **filters) -> float:
    """Geometric mean of Q over the matching runs.

    Q is itself a geometric mean over epochs, so the cross-run aggregate
    uses the same mean: it is the right average for a positive, log-scale
    quality score and keeps one divergent run from dominating the cell.
    """
    values = [
        r["q"]
        for r in records
        if all(r["config"][key] == value for key, value in filters.items())
    ]
    assert values, f"no runs match {filters}"
    return math.exp(sum(math.log(v) for v in values) / len(values))


@pytest.fixture(scope="session")
def gaussian_records():
    return ensure_sweep("gaussian-mini", "gaussian")


def test_criterion_1_code_table_exact():
    result = CliRunner().invoke(main, ["codes", "table", "--n", "3"])
    ok = result.exit_code == 0 and result.output == TABLE_N3 + "\n"
    criterion(1, "codes table --n 3 reproduces the reference table byte-for-byte", ok)


def test_criterion_2_closed_forms():
    ok = True
    for n in range(2, 17):
        brute = code_stats(make_code("sc", n)).avg_neighbor_hamming
        ok &= brute == sc_average_neighbor_hamming(n)
        ok &= code_stats(make_code("rgc", n)).avg_neighbor_hamming == 1
        ok &= code_stats(make_code("mgc", n)).avg_neighbor_hamming == 1
    averages = [
        float(code_stats(make_code("rc", 8, seed=s)).avg_neighbor_hamming)
        for s in range(100)
    ]
    stderr = float(np.std(averages, ddof=1) / math.sqrt(100))
    expected = rc_average_neighbor_hamming(8)
    ok &= expected == Fraction(2**8, 255) * 4
    ok &= abs(float(np.mean(averages)) - float(expected)) < 3 * stderr
    criterion(
        2,
        "average neighbor Hamming distances match the closed forms "
        "(SC exact rational for n=2..16, Gray codes exactly 1, "
        "RC within 3 standard errors over 100 seeds)",
        ok,
    )


def test_criterion_3_exhaustive_code_properties():
    report, failures = check_code_properties(16)
    criterion(
        3,
        "bijectivity, Gray property, RGC run length 2 and XOR-difference "
        "structure hold exhaustively for n <= 16",
        not failures and len(report) == 16,
    )


def test_criterion_4_simulator_exactness():
    ok = True
    for n in range(1, 13):
        for layers in (0, 1, 3):
            shape = CircuitShape(n, layers)
            probs = born_probabilities(
                build_state(CircuitParams(shape, np.zeros(shape.num_params)))
            )
            ok &= bool(np.max(np.abs(probs - 2.0**-n)) < 1e-12)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        shape = CircuitShape(n, int(rng.integers(0, 4)))
        theta = rng.uniform(-math.pi, math.pi, shape.num_params)
        state = build_state(CircuitParams(shape, theta))
        ok &= bool(abs(np.sum(state * state) - 1.0) < 1e-12)
    criterion(
        4,
        "zero-parameter circuits are uniform to 1e-12 for n <= 12 and the "
        "norm is preserved to 1e-12 across 1000 random circuits",
        ok,
    )


def test_criterion_5_gradient_oracle():
    cfg = KernelConfig()
    rng = np.random.default_rng(0)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        shape = CircuitShape(n, int(rng.integers(0, 3)))
        code = make_code(
            str(rng.choice(["sc", "rgc", "mgc", "rc"])), n, seed=int(rng.integers(1000))
        )
        space = make_space(n)
        data = rng.uniform(-1, 1, int(rng.integers(2, 16)))
        theta = rng.uniform(-math.pi, math.pi, shape.num_params)
        grad = shift_gradient(
            CircuitParams(shape, theta), data, code, space, cfg, exact=True
        )

        def loss(t):
            p = born_probabilities(build_state(CircuitParams(shape, t)))
            return mmd2_exact(pushforward(p, code), data, space, cfg)

        for i in range(shape.num_params):
            up, down = theta.copy(), theta.copy()
            up[i] += h
            down[i] -= h
            fd = (loss(up) - loss(down)) / (2 * h)
            worst = max(worst, abs(grad[i] - fd))
    criterion(
        5,
        "exact parameter-shift gradient matches central finite differences "
        f"to 1e-6 over 50 random instances (worst {worst:.2e})",
        worst < 1e-6,
    )


def test_criterion_6_mmd_oracle():
    cfg = KernelConfig()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        model = rng.uniform(-1, 1, int(rng.integers(1, 21)))
        data = rng.uniform(-1, 1, int(rng.integers(1, 21)))
        naive = sum(
            math.exp(-((a - b) ** 2) / (2 * s * s))
            for a in model for b in model for s in cfg.bandwidths
        ) / len(model) ** 2
        naive += sum(
            math.exp(-((a - b) ** 2) / (2 * s * s))
            for a in data for b in data for s in cfg.bandwidths
        ) / len(data) ** 2
        naive -= 2 * sum(
            math.exp(-((a - b) ** 2) / (2 * s * s))
            for a in model for b in data for s in cfg.bandwidths
        ) / (len(model) * len(data))
        value = mmd2(model, data, cfg)
        worst = max(worst, abs(value - naive) / max(1.0, abs(naive)))
    criterion(
        6,
        "mmd2 agrees with a naive double-sum to 1e-12 relative on 100 "
        f"random sample-set pairs (worst {worst:.2e})",
        worst < 1e-12,
    )


def test_criterion_7_centered_gaussian_orderings(gaussian_records):
    records = gaussian_records
    rgc_l0 = [r for r in records if r["config"]["code"] == "rgc" and r["config"]["layers"] == 0]
    final = float(np.mean([r["losses"][-1] for r in rgc_l0]))
    reference = float(np.mean([r["reference"] for r in rgc_l0]))
    part_a = final <= 3.0 * reference
    part_b = all(
        mean_q(records, code="rgc", layers=L) < mean_q(records, code="sc", layers=L)
        for L in (0, 1, 2)
    )
    part_c = mean_q(records, code="rc") >= 5.0 * mean_q(records, code="rgc")
    criterion(
        7,
        "centered Gaussian at n=8: reflected Gray converges to within 3x the "
        f"reference (final {final:.3e} vs reference {reference:.3e}), beats "
        "the standard code in mean Q at every depth, and the random code is "
        "at least 5x worse",
        part_a and part_b and part_c,
    )


def test_criterion_8_gaussian_mixture_matrix():
    records = ensure_sweep("mixture-mini", "mixture")
    cells = [(n, L) for n in (8, 12) for L in (0, 2, 4)]
    wins = 0
    for n, L in cells:
        scores = {
            code: mean_q(records, code=code, n=n, layers=L)
            for code in ("rc", "sc", "rgc", "mgc")
        }
        wins += min(scores, key=scores.get) == "rgc"
    criterion(
        8,
        "three-Gaussian mixture: reflected Gray has the lowest mean Q in "
        f"{wins}/{len(cells)} of the (n, L) cells (needs >= 60%)",
        wins / len(cells) >= 0.6,
    )


def test_criterion_9_sawtooth_spot_check():
    records = ensure_sweep("sawtooth-mini", "sawtooth")
    cells = [(nu, L) for nu in (0.03, 0.1) for L in (2, 4)]
    losses_to = {
        cell: (
            mean_q(records, code="rgc", nu=cell[0], layers=cell[1]),
            mean_q(records, code="sc", nu=cell[0], layers=cell[1]),
        )
        for cell in cells
    }
    ok = all(rgc < sc for rgc, sc in losses_to.values())
    criterion(
        9,
        "sawtooth mixture at n=12: reflected Gray beats the standard code in "
        "mean Q in every (width, depth) cell",
        ok,
    )


def test_criterion_10_determinism(gaussian_records):
    config = TrainingConfig(
        code="rgc", n=8, layers=0, epochs=100, shots=256,
        dataset_kind="centered_gaussian", nu=0.03, dataset_size=256,
        dataset_seed=0, init_seed=1, shots_seed=2,
    )
    fresh = train(config)
    saved = next(
        r for r in gaussian_records
        if r["config"]["code"] == "rgc"
        and r["config"]["layers"] == 0
        and r["config"]["dataset_seed"] == 0
    )
    repeat = train(config)
    ok = (
        np.max(np.abs(fresh.losses - repeat.losses)) < 1e-9
        and np.max(np.abs(fresh.losses - np.asarray(saved["losses"]))) < 1e-9
    )
    criterion(
        10,
        "rerunning a training cell with identical seeds reproduces the loss "
        "history to 1e-9 (including against the stored sweep record)",
        ok,
    )
