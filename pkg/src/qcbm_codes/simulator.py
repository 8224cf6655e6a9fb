"""Real-valued statevector simulation of the hardware-efficient ansatz.

The circuit is n qubits with L+1 layers of per-qubit R_y rotations,
interleaved with L entangling layers, each a staircase of nearest-neighbor
CNOTs along the line.  Since R_y
and CNOT have real entries, amplitudes are stored as a float64 vector of
length 2^n.  Qubit i carries bit b_i (the 2^i place), so amplitude index
int(b) addresses bitstring b directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Fixed (non-trainable) addend on every first-layer angle; drives each
# qubit to ~|+> at zero stored parameters.
FIRST_LAYER_OFFSET = math.pi / 2

INIT_HALF_WIDTH = 0.025


@dataclass(frozen=True)
class CircuitShape:
    n: int
    layers: int  # entangling-layer count L

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be >= 1, got {self.n}")
        if self.layers < 0:
            raise ValueError(f"layer count must be >= 0, got {self.layers}")

    @property
    def num_params(self) -> int:
        return self.n * (self.layers + 1)


@dataclass
class CircuitParams:
    shape: CircuitShape
    theta: np.ndarray  # layer-major, qubit-ascending; length n*(L+1)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.shape != (self.shape.num_params,):
            raise ValueError(
                f"expected {self.shape.num_params} angles, got {self.theta.shape}"
            )
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("angles must be finite")

    def shifted(self, i: int, delta: float) -> "CircuitParams":
        theta = self.theta.copy()
        theta[i] += delta
        return CircuitParams(self.shape, theta)


def apply_ry(state: np.ndarray, qubit: int, angle: float) -> None:
    """In-place R_y on one qubit via a strided pair sweep.

    R_y(t) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]].
    """
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    view = state.reshape(-1, 2, 2**qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = c * a0 - s * a1
    view[:, 1, :] = s * a0 + c * a1


def apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> None:
    """In-place CNOT: swaps the target bit on the control=1 half."""
    view = state.reshape([2] * n)
    # reshape axis k addresses qubit n-1-k
    sel0 = [slice(None)] * n
    sel0[n - 1 - control] = 1
    sel1 = list(sel0)
    sel0[n - 1 - target] = 0
    sel1[n - 1 - target] = 1
    i0, i1 = tuple(sel0), tuple(sel1)
    tmp = view[i0].copy()
    view[i0] = view[i1]
    view[i1] = tmp


def build_state(params: CircuitParams) -> np.ndarray:
    """Statevector of the ansatz, with first-layer pi/2 offsets applied."""
    n, layers = params.shape.n, params.shape.layers
    state = np.zeros(2**n, dtype=np.float64)
    state[0] = 1.0
    for layer in range(layers + 1):
        offset = FIRST_LAYER_OFFSET if layer == 0 else 0.0
        for q in range(n):
            apply_ry(state, q, params.theta[layer * n + q] + offset)
        if layer < layers:
            # staircase: CNOT(0,1), CNOT(1,2), ..., CNOT(n-2,n-1) in
            # ascending order; control is always the lower-index qubit
            for q in range(n - 1):
                apply_cnot(state, q, q + 1, n)
    return state


def born_probabilities(state: np.ndarray) -> np.ndarray:
    """p(b) = amplitude(b)^2."""
    return state * state


def sample_shots(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. outcome indices drawn from a probability vector.

    Inverse-CDF on the cumulative vector: O(2^n) build, O(log 2^n) per draw.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    cumulative = np.cumsum(probs)
    cumulative[-1] = 1.0
    return np.searchsorted(cumulative, rng.random(shots), side="right")


def init_params(shape: CircuitShape, rng_seed: int) -> CircuitParams:
    """Stored angles i.i.d. uniform on [-0.025, 0.025] (PCG64-seeded)."""
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    theta = rng.uniform(-INIT_HALF_WIDTH, INIT_HALF_WIDTH, shape.num_params)
    return CircuitParams(shape, theta)
