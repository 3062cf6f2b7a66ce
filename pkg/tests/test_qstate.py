from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pairqc.pairing import pair_number_chains
from pairqc.pauli import PauliChain, PauliChainSum, expectation
from pairqc.qstate import (
    StateVector,
    apply_phase,
    apply_ry,
    apply_unitary,
    inner_product,
    inverse_qft,
    measure_register,
    new_state,
    qft,
    register_probabilities,
    tensor,
)
from conftest import random_state_amplitudes

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_new_state():
    assert np.array_equal(new_state(1).amplitudes, [1, 0])
    s3 = new_state(3)
    assert len(s3) == 8 and s3.amplitudes[0] == 1 and np.count_nonzero(s3.amplitudes) == 1
    s8 = new_state(8)
    assert s8.norm() == pytest.approx(1.0)
    assert expectation(s8, pair_number_chains(8)) == pytest.approx(0.0)
    for bad in (0, 25):
        with pytest.raises(ValueError):
            new_state(bad)


def test_state_rejects_bad_length():
    with pytest.raises(ValueError):
        StateVector(np.ones(3))


def test_ry_examples():
    s = apply_ry(new_state(1), 0, pi)
    assert np.allclose(np.abs(s.amplitudes), [0, 1])
    s = apply_ry(new_state(1), 0, pi / 2)
    assert np.allclose(s.amplitudes, [np.cos(pi / 4), np.sin(pi / 4)])
    s = apply_ry(apply_ry(new_state(1), 0, 0.73), 0, -0.73)
    assert np.allclose(s.amplitudes, [1, 0], atol=1e-12)
    with pytest.raises(ValueError):
        apply_ry(new_state(2), 2, 0.1)


def test_bit_order_qubit_q_is_bit_q():
    s = apply_unitary(new_state(3), [1], X)
    assert s.amplitudes[2] == 1


def test_controlled_x():
    s = apply_unitary(new_state(2), [0], X, controls=[1])
    assert s.amplitudes[0] == 1
    s = apply_unitary(apply_unitary(new_state(2), [1], X), [0], X, controls=[1])
    assert s.amplitudes[3] == 1


def test_controlled_phase_composition(rng):
    amps = random_state_amplitudes(3, rng)
    p8 = np.diag([1, np.exp(1j * pi / 8)])
    a = apply_unitary(apply_unitary(StateVector(amps), [0], p8, [2]), [0], p8, [2])
    b = apply_unitary(StateVector(amps), [0], np.diag([1, np.exp(1j * pi / 4)]), [2])
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12
    c = apply_phase(StateVector(amps), 0, pi / 4, controls=[2])
    assert np.max(np.abs(c.amplitudes - b.amplitudes)) < 1e-12


def test_apply_unitary_errors():
    with pytest.raises(ValueError):
        apply_unitary(new_state(2), [0], np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        apply_unitary(new_state(2), [0], X, controls=[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_unitary_round_trip_and_linearity(seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    a, b = random_state_amplitudes(4, rng), random_state_amplitudes(4, rng)
    s = apply_unitary(StateVector(a), [3, 1], q, [0])
    assert abs(s.norm() - 1) < 1e-10
    back = apply_unitary(s, [3, 1], q.conj().T, [0])
    assert np.max(np.abs(back.amplitudes - a)) < 1e-12
    alpha, beta = 0.6, 0.8j
    lhs = apply_unitary(StateVector(alpha * a + beta * b), [2], X)
    rhs = alpha * apply_unitary(StateVector(a), [2], X).amplitudes + beta * apply_unitary(StateVector(b), [2], X).amplitudes
    assert np.allclose(lhs.amplitudes, rhs, atol=1e-12)


def test_qft_round_trip(rng):
    amps = random_state_amplitudes(5, rng)
    s = inverse_qft(qft(StateVector(amps), [1, 2, 4]), [1, 2, 4])
    assert np.max(np.abs(s.amplitudes - amps)) < 1e-12
    with pytest.raises(ValueError):
        qft(StateVector(amps), [1, 1])


def _phase_register(n_q, phi):
    k = np.arange(1 << n_q)
    return StateVector(np.exp(2j * pi * k * phi) / sqrt(1 << n_q))


def test_inverse_qft_exact_phase():
    n_q, j = 5, 11
    s = inverse_qft(_phase_register(n_q, j / 2**n_q), range(n_q))
    assert register_probabilities(s, range(n_q))[j] == pytest.approx(1.0, abs=1e-12)


def test_inverse_qft_one_third_matches_direct_dft():
    n_q, phi = 4, 1 / 3
    m = 1 << n_q
    p = register_probabilities(inverse_qft(_phase_register(n_q, phi), range(n_q)), range(n_q))
    k = np.arange(m)
    direct = np.array([abs(np.sum(np.exp(2j * pi * k * (phi - x / m)))) ** 2 / m**2 for x in range(m)])
    assert np.max(np.abs(p - direct)) < 1e-12
    assert set(np.argsort(p)[-2:]) == {5, 6}


def test_measure_definite_register(rng):
    s = apply_unitary(new_state(3), [1], X)
    out, _ = measure_register(s, [1, 2], rng)
    assert out == 1


def test_measure_statistics_reproducible():
    plus = StateVector([1, 1], normalize=True)
    draws = [measure_register(plus, [0], np.random.default_rng(s))[0] for s in range(5)]
    assert draws == [measure_register(plus, [0], np.random.default_rng(s))[0] for s in range(5)]
    rng = np.random.default_rng(7)
    shots = 10_000
    ones = sum(measure_register(plus, [0], rng)[0] for _ in range(shots))
    assert abs(ones / shots - 0.5) < 3 * sqrt(0.25 / shots)


def test_measure_collapse_matches_amplitude_filter(rng):
    amps = random_state_amplitudes(5, rng)
    s = StateVector(amps)
    out, collapsed = measure_register(s, [3, 4], rng)
    idx = np.arange(32)
    keep = ((idx >> 3) & 3) == out
    ref = np.where(keep, amps, 0)
    ref /= np.linalg.norm(ref)
    assert np.max(np.abs(collapsed.amplitudes - ref)) < 1e-12


def test_measure_forced_zero_branch_raises():
    with pytest.raises(ValueError):
        measure_register(new_state(2), [0], None, outcome=1)


def test_measurement_chi_square(rng):
    amps = random_state_amplitudes(3, rng)
    s = StateVector(amps)
    p = register_probabilities(s, [0, 1])
    shots = 10_000
    counts = np.bincount([measure_register(s, [0, 1], rng)[0] for _ in range(shots)], minlength=4)
    chi2 = np.sum((counts - shots * p) ** 2 / (shots * p))
    assert chi2 < 3 + 3 * sqrt(2 * 3)  # dof 3, mean + 3 sigma


def test_expectation_examples():
    assert expectation(new_state(1), PauliChainSum([PauliChain("Z")])) == pytest.approx(1.0)
    plus = StateVector([1, 1], normalize=True)
    assert expectation(plus, PauliChainSum([PauliChain("X")])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        expectation(new_state(2), PauliChainSum([PauliChain("Z")]))


def test_inner_product(rng):
    amps = random_state_amplitudes(3, rng)
    s = StateVector(amps)
    assert inner_product(s, s) == pytest.approx(1.0)
    e1, e2 = StateVector(np.eye(4)[1]), StateVector(np.eye(4)[2])
    assert inner_product(e1, e2) == 0
    with pytest.raises(ValueError):
        inner_product(s, new_state(2))


def test_tensor_places_high_register_above():
    t = tensor(apply_unitary(new_state(1), [0], X), new_state(2))
    assert t.n_qubits == 3 and t.amplitudes[4] == 1
