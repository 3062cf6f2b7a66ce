from math import comb, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pairqc.ansatz import (
    AnsatzParams,
    bcs_energy,
    expected_pairs,
    mean_field_excitation_energy,
    pairing_gap,
    prepare_bcs,
    prepare_qp_excited,
    quasiparticle_energies,
)
from pairqc.pairing import PairingSpec, hamiltonian_chains, pair_number_chains, sector_basis, sector_eigen
from pairqc.pauli import expectation
from pairqc.projection import hamming_weights, projector_oracle
from pairqc.qstate import inner_product

angles = st.lists(st.floats(-3.0, 3.0, allow_nan=False), min_size=1, max_size=7)


def test_limits():
    vac = prepare_bcs(AnsatzParams((pi / 2,) * 4))
    assert abs(vac.amplitudes[0]) == pytest.approx(1)
    full = prepare_bcs(AnsatzParams((0.0,) * 4))
    assert abs(full.amplitudes[15]) == pytest.approx(1)
    assert expected_pairs(AnsatzParams((0.0,) * 4)) == pytest.approx(4)


def test_uniform_quarter_angles():
    s = prepare_bcs(AnsatzParams((pi / 4,) * 8))
    assert np.allclose(np.abs(s.amplitudes), 2.0**-4)
    w = hamming_weights(8)
    assert np.sum(s.probabilities()[w == 4]) == pytest.approx(comb(8, 4) / 256)
    assert expected_pairs(np.full(8, pi / 4)) == pytest.approx(4.0)


def test_amplitudes_real():
    s = prepare_bcs(AnsatzParams((0.1, 0.7, 1.3)))
    assert np.max(np.abs(s.amplitudes.imag)) == 0


@settings(max_examples=40, deadline=None)
@given(angles)
def test_expected_pairs_matches_simulator(th):
    s = prepare_bcs(AnsatzParams(th))
    assert expected_pairs(th) == pytest.approx(expectation(s, pair_number_chains(len(th))), abs=1e-12)
    t = np.array(th)
    assert expected_pairs(-t) == pytest.approx(expected_pairs(t), abs=1e-12)
    assert expected_pairs(pi - t) == pytest.approx(expected_pairs(t), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(angles, st.floats(0.0, 2.0))
def test_closed_form_energy_matches_chains(th, g):
    spec = PairingSpec(len(th), g, 0)
    s = prepare_bcs(AnsatzParams(th))
    assert bcs_energy(spec, th) == pytest.approx(expectation(s, hamiltonian_chains(spec)), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(angles, st.data())
def test_qp_orthogonal_and_shift_identity(th, data):
    n = len(th)
    exc = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    p = AnsatzParams(th, excitation_set=exc)
    bcs = prepare_bcs(AnsatzParams(th))
    qp = prepare_qp_excited(p)
    assert abs(inner_product(bcs, qp)) < 1e-12
    shifted = list(th)
    for i in exc:
        shifted[i] += pi / 2
    circ = prepare_bcs(AnsatzParams(shifted))
    assert abs(abs(inner_product(circ, qp)) - 1) < 1e-12


def test_qp_factor_exact_sign():
    th = 0.4
    qp = prepare_qp_excited(AnsatzParams((th,), excitation_set=(0,)))
    assert np.allclose(qp.amplitudes, [-np.cos(th), np.sin(th)])
    flipped = prepare_qp_excited(AnsatzParams((0.0, 0.3), excitation_set=(0,)))
    ref = prepare_bcs(AnsatzParams((pi / 2, 0.3)))
    assert abs(abs(inner_product(flipped, ref)) - 1) < 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        AnsatzParams((0.1, 0.2), excitation_set=(1, 1))
    with pytest.raises(ValueError):
        AnsatzParams((0.1, 0.2), excitation_set=(2,))
    with pytest.raises(ValueError):
        prepare_bcs(AnsatzParams((0.1, 0.2), excitation_set=(0,)))
    with pytest.raises(ValueError):
        prepare_qp_excited(AnsatzParams((0.1, 0.2)))
    with pytest.raises(ValueError):
        prepare_bcs(AnsatzParams((0.1, 0.2)), register=3)


def test_mean_field_energies():
    spec = PairingSpec(4, 0.5, 2)
    p = AnsatzParams((0.3, 0.6, 0.9, 1.2), fermi_energy=2.0)
    assert mean_field_excitation_energy(spec, p) == pytest.approx(bcs_energy(spec, p.thetas))
    qp = quasiparticle_energies(spec, p)
    assert qp[1] == pytest.approx(pairing_gap(spec, p.thetas))  # eps_2 = 2 sits at lambda
    free = quasiparticle_energies(spec.with_g(0.0), p)
    assert np.allclose(free, np.abs(spec.eps - 2.0))
    e = mean_field_excitation_energy(spec, p, (0, 3))
    assert e == pytest.approx(bcs_energy(spec, p.thetas) + 2 * (qp[0] + qp[3]))


def test_projected_qp_state_shifts_weight_to_excited_states(spec, converged):
    th = converged["QVAP"].thetas
    res = sector_eigen(spec)
    basis = sector_basis(8, 4)
    vac = projector_oracle(prepare_bcs(AnsatzParams(tuple(th))), 4)
    qp = projector_oracle(prepare_qp_excited(AnsatzParams(tuple(th), excitation_set=(2,))), 4)
    w_vac = np.abs(res.eigenvectors.conj().T @ vac.amplitudes[basis]) ** 2
    w_qp = np.abs(res.eigenvectors.conj().T @ qp.amplitudes[basis]) ** 2
    gs, first = 0, 1
    assert w_qp[gs] < w_vac[gs]
    assert w_qp[gs] > 1e-6  # projection does not preserve orthogonality
    assert w_qp[first] > w_vac[first]
