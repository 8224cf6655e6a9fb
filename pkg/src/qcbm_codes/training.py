"""Training loop: parameter-shift gradients, Adam and the quality score.

One epoch is one full-dataset Adam update.  Gradients follow the shift
rule for R_y generators: component i combines kernel expectations between
the unshifted circuit, the data, and the two circuits with parameter i
shifted by +-pi/2 (2 n (L+1) + 1 circuit evaluations per gradient).  The
per-epoch loss is recorded from a fresh shot sample of the updated
circuit, matching the estimation noise seen during training.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .codes import BinaryCode, make_code
from .mmd import DEFAULT_BANDWIDTHS, GridKernel, KernelConfig, mmd2
from .simulator import (
    CircuitParams,
    CircuitShape,
    born_probabilities,
    build_state,
    init_params,
    sample_shots,
)
from .target import (
    Dataset,
    DiscretizedSpace,
    TargetDistribution,
    discretize,
    make_space,
    pushforward,
    sample_dataset,
)

LOSS_CLAMP = 1e-12

# Stream tag mixed into the dataset seed for the held-out reference draw.
_REFERENCE_STREAM = 7001


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class AdamState:
    step: int
    m: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, dim: int) -> "AdamState":
        return cls(0, np.zeros(dim), np.zeros(dim))


def adam_step(
    state: AdamState, theta: np.ndarray, grad: np.ndarray, cfg: AdamConfig
) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; purely deterministic."""
    if theta.shape != grad.shape or theta.shape != state.m.shape:
        raise ValueError("parameter/gradient/state dimension mismatch")
    step = state.step + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad**2
    m_hat = m / (1.0 - cfg.beta1**step)
    v_hat = v / (1.0 - cfg.beta2**step)
    theta_new = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return theta_new, AdamState(step, m, v)


@dataclass
class EvalCounter:
    count: int = 0


def _sampled_indices(
    state: np.ndarray, code: BinaryCode, shots: int, rng: np.random.Generator
) -> np.ndarray:
    outcomes = sample_shots(born_probabilities(state), shots, rng)
    return code.inverse[outcomes]


def shift_gradient(
    params: CircuitParams,
    data: np.ndarray,
    code: BinaryCode,
    space: DiscretizedSpace,
    cfg: KernelConfig,
    shots: int = 256,
    rng: np.random.Generator | None = None,
    exact: bool = False,
    grid: GridKernel | None = None,
    counter: EvalCounter | None = None,
) -> np.ndarray:
    """Gradient of the MMD^2 loss via the parameter-shift rule.

    In shot mode every expectation is estimated from ``shots`` fresh
    measurements per circuit; in exact mode the Born probabilities are
    used directly (for gradient-verification tests and diagnostics).
    """
    if grid is None:
        grid = GridKernel(space, data, cfg)
    if counter is None:
        counter = EvalCounter()
    if not exact and rng is None:
        raise ValueError("shot mode requires an rng")

    def evaluate(p: CircuitParams):
        counter.count += 1
        state = build_state(p)
        if exact:
            return pushforward(born_probabilities(state), code)
        return _sampled_indices(state, code, shots, rng)

    base = evaluate(params)
    grad = np.empty(params.shape.num_params)
    for i in range(params.shape.num_params):
        plus = evaluate(params.shifted(i, math.pi / 2))
        minus = evaluate(params.shifted(i, -math.pi / 2))
        if exact:
            grad[i] = (
                grid.expect_probs_probs(base, plus)
                - grid.expect_probs_probs(base, minus)
                - grid.expect_probs_data(plus)
                + grid.expect_probs_data(minus)
            )
        else:
            grad[i] = (
                grid.expect_model_model(base, plus)
                - grid.expect_model_model(base, minus)
                - grid.expect_model_data(plus)
                + grid.expect_model_data(minus)
            )
    return grad


def reference_loss(
    train: Dataset,
    target: TargetDistribution,
    space: DiscretizedSpace,
    cfg: KernelConfig,
    seed,
) -> float:
    """Loss a well-trained model should reach: MMD^2 between a fresh,
    discretized test draw from the target and the raw training samples."""
    rng = np.random.Generator(np.random.PCG64(seed))
    test = target.sample(len(train.samples), rng)
    test_idx = discretize(np.clip(test, -1.0, 1.0), space)
    return mmd2(space.representatives[test_idx], train.samples, cfg)


def q_score(history) -> float:
    """Geometric mean of the loss history: exp(mean(log(loss)))."""
    history = np.asarray(history, dtype=np.float64)
    if history.size == 0:
        raise ValueError("empty loss history")
    if np.any(history <= 0):
        raise ValueError("loss history must be strictly positive; clamp first")
    return float(np.exp(np.mean(np.log(history))))


@dataclass(frozen=True)
class TrainingConfig:
    code: str = "rgc"
    n: int = 8
    layers: int = 0
    epochs: int = 100
    shots: int = 256
    dataset_kind: str = "centered_gaussian"
    nu: float = 0.03
    dataset_size: int = 256
    dataset_seed: int = 0
    init_seed: int = 1
    shots_seed: int = 2
    code_seed: int | None = None  # random code table; defaults to dataset_seed
    bandwidths: tuple[float, ...] = DEFAULT_BANDWIDTHS
    adam: AdamConfig = field(default_factory=AdamConfig)
    exact_loss: bool = False  # also record mmd2 under exact Born probabilities

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")


@dataclass
class TrainingRecord:
    config: TrainingConfig
    losses: np.ndarray  # one shot-estimated MMD^2 per epoch
    exact_losses: np.ndarray | None
    final_theta: np.ndarray
    q: float
    reference: float
    clamp_count: int
    synthetic_counts: np.ndarray  # final-epoch sample histogram over representatives
    epoch_ms: np.ndarray


def train(config: TrainingConfig) -> TrainingRecord:
    """Run the full training loop; deterministic given the config seeds."""
    dataset, target = sample_dataset(
        config.dataset_kind, config.dataset_size, config.nu, config.dataset_seed
    )
    space = make_space(config.n)
    code_seed = config.dataset_seed if config.code_seed is None else config.code_seed
    code = make_code(config.code, config.n, seed=code_seed)
    kernel_cfg = KernelConfig(tuple(config.bandwidths))
    grid = GridKernel(space, dataset.samples, kernel_cfg)
    shape = CircuitShape(config.n, config.layers)
    params = init_params(shape, config.init_seed)
    adam_state = AdamState.zeros(shape.num_params)
    rng = np.random.Generator(np.random.PCG64([config.shots_seed, 0]))

    reference = reference_loss(
        dataset, target, space, kernel_cfg,
        seed=[config.dataset_seed, _REFERENCE_STREAM],
    )

    losses = np.empty(config.epochs)
    exact_losses = np.empty(config.epochs) if config.exact_loss else None
    epoch_ms = np.empty(config.epochs)
    for epoch in range(config.epochs):
        start = time.perf_counter()
        grad = shift_gradient(
            params, dataset.samples, code, space, kernel_cfg,
            shots=config.shots, rng=rng, grid=grid,
        )
        theta, adam_state = adam_step(adam_state, params.theta, grad, config.adam)
        params = CircuitParams(shape, theta)

        state = build_state(params)
        idx = _sampled_indices(state, code, config.shots, rng)
        losses[epoch] = grid.mmd2_shots(idx)
        if exact_losses is not None:
            exact_losses[epoch] = grid.mmd2_probs(pushforward(born_probabilities(state), code))
        epoch_ms[epoch] = (time.perf_counter() - start) * 1e3

    final_idx = _sampled_indices(build_state(params), code, config.shots, rng)
    synthetic_counts = np.bincount(final_idx, minlength=2**config.n)

    clamp_count = int(np.sum(losses <= 0))
    q = q_score(np.maximum(losses, LOSS_CLAMP))
    return TrainingRecord(
        config=config,
        losses=losses,
        exact_losses=exact_losses,
        final_theta=params.theta,
        q=q,
        reference=reference,
        clamp_count=clamp_count,
        synthetic_counts=synthetic_counts,
        epoch_ms=epoch_ms,
    )


def record_to_dict(record: TrainingRecord) -> dict:
    return {
        "config": asdict(record.config),
        "losses": record.losses.tolist(),
        "exact_losses": None if record.exact_losses is None else record.exact_losses.tolist(),
        "final_theta": record.final_theta.tolist(),
        "q": record.q,
        "reference": record.reference,
        "clamp_count": record.clamp_count,
        "wallclock_ms": record.epoch_ms.tolist(),
    }


def save_record(record: TrainingRecord, run_dir: str | Path) -> None:
    """Write record.json, losses.csv and synthetic.csv into ``run_dir``."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "record.json").write_text(json.dumps(record_to_dict(record), indent=2))
    lines = ["epoch,mmd2,mmd2_exact,wallclock_ms"]
    for epoch in range(len(record.losses)):
        exact = "" if record.exact_losses is None else repr(float(record.exact_losses[epoch]))
        lines.append(
            f"{epoch},{float(record.losses[epoch])!r},{exact},{record.epoch_ms[epoch]:.3f}"
        )
    (run_dir / "losses.csv").write_text("\n".join(lines) + "\n")
    hist = ["bin,count"] + [
        f"{j},{c}" for j, c in enumerate(record.synthetic_counts)
    ]
    (run_dir / "synthetic.csv").write_text("\n".join(hist) + "\n")


def load_record(run_dir: str | Path) -> dict:
    """Raw dict form of a saved record (config echo plus histories)."""
    return json.loads((Path(run_dir) / "record.json").read_text())
