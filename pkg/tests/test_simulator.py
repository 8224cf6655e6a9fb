import math

import numpy as np
import pytest

from qcbm_codes.simulator import (
    FIRST_LAYER_OFFSET,
    CircuitParams,
    CircuitShape,
    apply_cnot,
    apply_ry,
    born_probabilities,
    build_state,
    init_params,
    sample_shots,
)


def stored(shape, effective):
    """Stored angles whose effective first-layer value equals ``effective``."""
    theta = np.asarray(effective, dtype=np.float64).copy()
    theta[: shape.n] -= FIRST_LAYER_OFFSET
    return CircuitParams(shape, theta)


class TestGates:
    def test_ry_matrix_on_basis_states(self):
        for theta in (0.3, -1.2, math.pi / 2):
            c, s = math.cos(theta / 2), math.sin(theta / 2)
            state = np.array([1.0, 0.0])
            apply_ry(state, 0, theta)
            assert np.allclose(state, [c, s])
            state = np.array([0.0, 1.0])
            apply_ry(state, 0, theta)
            assert np.allclose(state, [-s, c])

    def test_ry_strided_middle_qubit(self):
        # acting on qubit 1 of 3 must pair indices differing in bit 1
        rng = np.random.default_rng(0)
        state = rng.normal(size=8)
        state /= np.linalg.norm(state)
        expected = state.copy()
        theta = 0.7
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        for b in range(8):
            if not b & 2:
                a0, a1 = state[b], state[b | 2]
                expected[b] = c * a0 - s * a1
                expected[b | 2] = s * a0 + c * a1
        apply_ry(state, 1, theta)
        assert np.allclose(state, expected, atol=1e-14)

    def test_cnot_basis_action(self):
        # control=0, target=2 on 3 qubits: flips bit 2 where bit 0 is set
        for b in range(8):
            state = np.zeros(8)
            state[b] = 1.0
            apply_cnot(state, 0, 2, 3)
            expected = b ^ 4 if b & 1 else b
            assert state[expected] == 1.0 and state.sum() == 1.0

    def test_norm_preservation_random_circuits(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            layers = int(rng.integers(0, 4))
            shape = CircuitShape(n, layers)
            params = CircuitParams(shape, rng.uniform(-math.pi, math.pi, shape.num_params))
            state = build_state(params)
            assert state.dtype == np.float64  # amplitudes stay real
            assert abs(np.sum(state * state) - 1.0) < 1e-12


class TestBuildState:
    def test_ry_pi_flips_qubit(self):
        shape = CircuitShape(1, 0)
        state = build_state(stored(shape, [math.pi]))
        assert np.allclose(state, [0.0, 1.0], atol=1e-15)

    def test_single_qubit_analytic_probability(self):
        # p(1) = sin^2(theta / 2)
        shape = CircuitShape(1, 0)
        state = build_state(stored(shape, [2 * math.pi / 3]))
        probs = born_probabilities(state)
        assert abs(probs[1] - 0.75) < 1e-14

    def test_zero_params_uniform(self):
        for n, layers in [(1, 0), (2, 1), (3, 2), (5, 3), (8, 2)]:
            shape = CircuitShape(n, layers)
            params = CircuitParams(shape, np.zeros(shape.num_params))
            probs = born_probabilities(build_state(params))
            assert np.max(np.abs(probs - 2.0**-n)) < 1e-12

    def test_no_entangling_layer_factorizes(self):
        # with L=0 the joint distribution is the product of per-qubit ones
        rng = np.random.default_rng(3)
        n = 4
        shape = CircuitShape(n, 0)
        theta = rng.uniform(-math.pi, math.pi, n)
        probs = born_probabilities(build_state(CircuitParams(shape, theta)))
        marginals = []
        for q in range(n):
            p1 = math.sin((theta[q] + FIRST_LAYER_OFFSET) / 2) ** 2
            marginals.append((1 - p1, p1))
        for b in range(2**n):
            expected = math.prod(marginals[q][(b >> q) & 1] for q in range(n))
            assert abs(probs[b] - expected) < 1e-12

    def test_parameter_count_and_validation(self):
        shape = CircuitShape(3, 2)
        assert shape.num_params == 9
        with pytest.raises(ValueError):
            CircuitParams(shape, np.zeros(8))
        with pytest.raises(ValueError):
            CircuitParams(shape, np.full(9, np.nan))
        with pytest.raises(ValueError):
            CircuitShape(0, 1)
        with pytest.raises(ValueError):
            CircuitShape(2, -1)

    def test_odd_qubit_count_runs(self):
        shape = CircuitShape(5, 2)
        probs = born_probabilities(build_state(CircuitParams(shape, np.zeros(15))))
        assert abs(probs.sum() - 1.0) < 1e-12


class TestSampling:
    def test_point_mass(self):
        probs = np.array([0.0, 0.0, 1.0, 0.0])
        outcomes = sample_shots(probs, 50, np.random.default_rng(0))
        assert np.all(outcomes == 2)

    def test_determinism(self):
        probs = np.full(8, 1 / 8)
        a = sample_shots(probs, 100, np.random.Generator(np.random.PCG64(9)))
        b = sample_shots(probs, 100, np.random.Generator(np.random.PCG64(9)))
        assert np.array_equal(a, b)

    def test_uniform_concentration(self):
        shots = 10**6
        probs = np.full(4, 0.25)
        outcomes = sample_shots(probs, shots, np.random.default_rng(11))
        counts = np.bincount(outcomes, minlength=4)
        sigma = math.sqrt(0.25 * 0.75 / shots)
        assert np.all(np.abs(counts / shots - 0.25) < 5 * sigma)

    def test_shots_validation(self):
        with pytest.raises(ValueError):
            sample_shots(np.array([1.0]), 0, np.random.default_rng(0))


class TestInitParams:
    def test_bounds_and_determinism(self):
        shape = CircuitShape(6, 3)
        params = init_params(shape, 42)
        assert np.all(np.abs(params.theta) <= 0.025)
        assert len(params.theta) == shape.num_params
        assert np.array_equal(params.theta, init_params(shape, 42).theta)
        assert not np.array_equal(params.theta, init_params(shape, 43).theta)

    def test_initial_distribution_near_uniform(self):
        shape = CircuitShape(8, 3)
        probs = born_probabilities(build_state(init_params(shape, 0)))
        tv = 0.5 * np.abs(probs - 2.0**-8).sum()
        assert tv < 0.05
