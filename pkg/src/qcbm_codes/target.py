"""Target densities on [-1, 1], dataset sampling and discretization.

The data space is split into 2^n equal-width cells with representatives at
the cell centers, x_j = -1 + (2j+1)/2^n.  Nearest-representative binning is
exact for the Gaussian kernels used in the loss, since they are monotone in
|x - x_j|.  Exact boundary points resolve to the larger index.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erf

from .codes import BinaryCode


@dataclass(frozen=True)
class DiscretizedSpace:
    n: int
    representatives: np.ndarray  # 2^n cell centers, strictly increasing
    edges: np.ndarray  # 2^n + 1 cell boundaries from -1 to 1

    @property
    def cell_width(self) -> float:
        return 2.0 / 2**self.n


def make_space(n: int) -> DiscretizedSpace:
    if n < 1:
        raise ValueError(f"bit count must be >= 1, got {n}")
    size = 2**n
    edges = -1.0 + 2.0 * np.arange(size + 1) / size
    representatives = -1.0 + (2.0 * np.arange(size) + 1.0) / size
    representatives.setflags(write=False)
    edges.setflags(write=False)
    return DiscretizedSpace(n, representatives, edges)


def discretize(x, space: DiscretizedSpace):
    """Index of the nearest representative (ties resolve upward).

    Accepts a scalar or an array; cells are left-closed, so a point on the
    boundary between cells j and j+1 lands in cell j+1, and x = 1 lands in
    the last cell.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < -1.0) or np.any(arr > 1.0):
        raise ValueError("data point outside [-1, 1]")
    size = 2**space.n
    idx = np.floor((arr + 1.0) / 2.0 * size).astype(np.int64)
    idx = np.minimum(idx, size - 1)
    return int(idx) if np.isscalar(x) else idx


def _gaussian_cell_masses(mean: float, nu: float, space: DiscretizedSpace) -> np.ndarray:
    # End cells absorb the tail mass: out-of-range samples are clipped to
    # +-1, which lands them in the first/last cell.
    z = (space.edges - mean) / (nu * math.sqrt(2.0))
    cdf = 0.5 * (1.0 + erf(z))
    cdf[0] = 0.0
    cdf[-1] = 1.0
    return np.diff(cdf)


@dataclass(frozen=True)
class CenteredGaussian:
    """Normal(0, nu^2) with samples clipped to [-1, 1]."""

    nu: float
    kind: str = field(default="centered_gaussian", init=False)

    @property
    def means(self) -> tuple[float, ...]:
        return (0.0,)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return np.clip(rng.normal(0.0, self.nu, count), -1.0, 1.0)

    def cell_masses(self, space: DiscretizedSpace) -> np.ndarray:
        return _gaussian_cell_masses(0.0, self.nu, space)


@dataclass(frozen=True)
class GaussianMixture:
    """Equal-weight mixture of three Gaussians of width nu.

    If any raw sample falls outside [-1, 1], the whole sample vector is
    rescaled by the affine map sending
    [min(-1, min(samples)), max(1, max(samples))] onto [-1, 1].  The map
    applies to the samples only; cell_masses integrates the unrescaled
    density (tails assigned to the end cells, as for clipping).
    """

    means: tuple[float, float, float]
    nu: float
    kind: str = field(default="gaussian_mixture", init=False)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        component = rng.integers(0, len(self.means), count)
        raw = rng.normal(np.asarray(self.means)[component], self.nu)
        lo = min(-1.0, raw.min())
        hi = max(1.0, raw.max())
        if lo < -1.0 or hi > 1.0:
            raw = -1.0 + 2.0 * (raw - lo) / (hi - lo)
        return raw

    def cell_masses(self, space: DiscretizedSpace) -> np.ndarray:
        masses = sum(_gaussian_cell_masses(m, self.nu, space) for m in self.means)
        return masses / len(self.means)


@dataclass(frozen=True)
class SawtoothMixture:
    """Equal-weight mixture of three decreasing triangular densities.

    Each component has density (nu + mu - x) / (2 nu^2) on [mu - nu,
    mu + nu] and zero elsewhere; means are kept inside [-1 + nu, 1 - nu]
    so no clipping occurs.
    """

    means: tuple[float, float, float]
    nu: float
    kind: str = field(default="sawtooth_mixture", init=False)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        component = rng.integers(0, len(self.means), count)
        u = rng.random(count)
        # inverse CDF of the decreasing triangle on [mu - nu, mu + nu]
        return np.asarray(self.means)[component] + self.nu - 2.0 * self.nu * np.sqrt(1.0 - u)

    def _component_cdf(self, x: np.ndarray, mu: float) -> np.ndarray:
        t = np.clip(mu + self.nu - x, 0.0, 2.0 * self.nu)
        return 1.0 - t * t / (4.0 * self.nu**2)

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        total = np.zeros_like(x)
        for mu in self.means:
            inside = (x >= mu - self.nu) & (x <= mu + self.nu)
            total += np.where(inside, (self.nu + mu - x) / (2.0 * self.nu**2), 0.0)
        return total / len(self.means)

    def cell_masses(self, space: DiscretizedSpace) -> np.ndarray:
        masses = sum(np.diff(self._component_cdf(space.edges, m)) for m in self.means)
        return masses / len(self.means)


TargetDistribution = CenteredGaussian | GaussianMixture | SawtoothMixture

TARGET_KINDS = ("centered_gaussian", "gaussian_mixture", "sawtooth_mixture")


def make_target(kind: str, nu: float, rng: np.random.Generator) -> TargetDistribution:
    """Build a target density; mixture means are drawn from ``rng``."""
    if nu <= 0:
        raise ValueError(f"width nu must be positive, got {nu}")
    if kind == "centered_gaussian":
        return CenteredGaussian(nu)
    if kind == "gaussian_mixture":
        means = tuple(rng.uniform(-1.0, 1.0, 3))
        return GaussianMixture(means, nu)
    if kind == "sawtooth_mixture":
        means = tuple(rng.uniform(-1.0 + nu, 1.0 - nu, 3))
        return SawtoothMixture(means, nu)
    raise ValueError(f"unknown target kind {kind!r}; expected one of {TARGET_KINDS}")


@dataclass(frozen=True)
class Dataset:
    samples: np.ndarray
    kind: str
    nu: float
    seed: int
    means: tuple[float, ...]

    def __post_init__(self):
        if np.any(self.samples < -1.0) or np.any(self.samples > 1.0):
            raise ValueError("dataset values must lie in [-1, 1]")


def sample_dataset(kind: str, count: int, nu: float, seed: int) -> tuple[Dataset, TargetDistribution]:
    """Draw a dataset and the target it came from, reproducibly.

    A single PCG64 stream per seed: mixture means are drawn first, then
    the samples, so identical seeds give identical means and samples.
    """
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    rng = np.random.Generator(np.random.PCG64(seed))
    target = make_target(kind, nu, rng)
    samples = target.sample(count, rng)
    return Dataset(samples, kind, nu, seed, target.means), target


def sample_centered_gaussian(count: int, nu: float, seed: int) -> Dataset:
    return sample_dataset("centered_gaussian", count, nu, seed)[0]


def sample_gaussian_mixture(count: int, nu: float, seed: int) -> Dataset:
    return sample_dataset("gaussian_mixture", count, nu, seed)[0]


def sample_sawtooth_mixture(count: int, nu: float, seed: int) -> Dataset:
    return sample_dataset("sawtooth_mixture", count, nu, seed)[0]


def target_from_dataset(dataset: Dataset) -> TargetDistribution:
    """Reconstruct the generating density recorded in a dataset."""
    if dataset.kind == "centered_gaussian":
        return CenteredGaussian(dataset.nu)
    if dataset.kind == "gaussian_mixture":
        return GaussianMixture(dataset.means, dataset.nu)
    if dataset.kind == "sawtooth_mixture":
        return SawtoothMixture(dataset.means, dataset.nu)
    raise ValueError(f"unknown dataset kind {dataset.kind!r}")


def discretized_target(q: TargetDistribution, space: DiscretizedSpace) -> np.ndarray:
    """Probability vector over representatives: cell integrals of q."""
    masses = q.cell_masses(space)
    total = masses.sum()
    if not math.isclose(total, 1.0, abs_tol=1e-8):
        raise ValueError(f"cell masses sum to {total}, expected 1")
    return masses / total


def pushforward(p: np.ndarray, code: BinaryCode) -> np.ndarray:
    """Map bitstring-index probabilities to representative probabilities.

    Entry j is p(int(f(j))): a permutation of p.
    """
    p = np.asarray(p)
    if p.shape != (2**code.n,):
        raise ValueError(f"expected {2**code.n} entries, got {p.shape}")
    return p[code.codewords]


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """CSV of samples (one full-precision value per line) + JSON sidecar."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for value in dataset.samples:
            writer.writerow([repr(float(value))])
    sidecar = {
        "kind": dataset.kind,
        "nu": dataset.nu,
        "seed": dataset.seed,
        "means": list(dataset.means),
        "count": len(dataset.samples),
    }
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2))


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    with open(path, newline="") as fh:
        samples = np.array([float(row[0]) for row in csv.reader(fh)])
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    return Dataset(samples, meta["kind"], meta["nu"], meta["seed"], tuple(meta["means"]))
