import itertools
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pairqc.errors import OracleGuardError
from pairqc.pairing import (
    PairingSpec,
    correlation_error,
    dense_sector_hamiltonian,
    exact_spectrum,
    hamiltonian_chains,
    hf_energy,
    hf_state,
    sector_basis,
)
from pairqc.pauli import PauliChain, PauliChainSum, apply_pauli, expectation, sampled_expectation
from pairqc.qstate import StateVector
from pairqc.spectra import default_emax
from conftest import random_state_amplitudes

E_GS = 16.889170412332412  # hermitian_eigen of the 70x70 reference sector matrix
E_1ST = 19.480945605685768


def test_spec_validation_and_round_trip():
    s = PairingSpec(3, 0.2, 1, (0.5, 1.0, 3.0))
    assert PairingSpec.from_dict(s.to_dict()) == s
    with pytest.raises(ValueError):
        PairingSpec(3, 0.2, 4)
    with pytest.raises(ValueError):
        PairingSpec(3, 0.2, 1, (1.0, 2.0))
    assert PairingSpec().epsilons == tuple(float(p) for p in range(1, 9))


def test_chain_counts():
    h1 = hamiltonian_chains(PairingSpec(1, 0.4, 0))
    assert len(h1) == 2
    c = {t.letters: t.coeff for t in h1}
    assert c["I"] == pytest.approx(0.8) and c["Z"] == pytest.approx(-0.8)
    h2 = hamiltonian_chains(PairingSpec(2, 0.5, 1))
    kinds = sorted(t.letters for t in h2)
    assert kinds == ["II", "IZ", "XX", "YY", "ZI"]


def test_coefficient_l1_norm_closed_form(spec):
    h = hamiltonian_chains(spec)
    non_const = h.l1_norm(include_identity=False)
    # |beta| of Z_p is |eps_p - g/2|; each pair carries two chains of |g|/2
    assert non_const == pytest.approx(np.sum(np.abs(spec.eps - spec.g / 2)) + spec.g * 28)
    assert default_emax(spec) == pytest.approx(np.sum(np.abs(2 * spec.eps - spec.g)) + spec.g * 28)
    assert default_emax(spec) == pytest.approx(82.0)


def test_sector_matrix_small_cases():
    assert np.allclose(dense_sector_hamiltonian(PairingSpec(2, 0.0, 1, (1.0, 3.0))), np.diag([2.0, 6.0]))
    e1, e2, g = 1.0, 2.5, 0.7
    h = dense_sector_hamiltonian(PairingSpec(2, g, 1, (e1, e2)))
    assert np.allclose(h, [[2 * e1 - g, -g], [-g, 2 * e2 - g]])
    gs = exact_spectrum(PairingSpec(2, g, 1, (e1, e2)))[0]
    assert gs == pytest.approx(e1 + e2 - g - np.sqrt((e2 - e1) ** 2 + g**2), abs=1e-12)


def test_reference_sector(spec):
    t0 = time.perf_counter()
    h = dense_sector_hamiltonian(spec)
    assert h.shape == (70, 70)
    e = exact_spectrum(spec)
    assert e[0] == pytest.approx(E_GS, abs=1e-10)
    assert e[1] == pytest.approx(E_1ST, abs=1e-10)
    assert np.allclose(e, np.linalg.eigvalsh(h), atol=1e-10)
    assert time.perf_counter() - t0 < 5


def test_sector_matrix_equals_chain_action(spec):
    basis = sector_basis(spec.n_levels, spec.target_pairs)
    h = dense_sector_hamiltonian(spec)
    chains = hamiltonian_chains(spec)
    cols = np.array([chains.apply(StateVector(np.eye(256)[b])) for b in basis]).T
    assert np.max(np.abs(cols[basis] - h)) < 1e-12
    outside = np.setdiff1d(np.arange(256), basis)
    assert np.max(np.abs(cols[outside])) < 1e-12


def test_non_interacting_spectrum():
    s = PairingSpec(5, 0.0, 2, (0.3, 1.1, 1.7, 2.9, 4.0))
    ref = sorted(2 * sum(c) for c in itertools.combinations(s.epsilons, 2))
    assert np.allclose(exact_spectrum(s), ref)


def test_spectrum_invariant_under_level_permutation(rng):
    eps = tuple(rng.uniform(0, 5, 6))
    perm = tuple(np.array(eps)[rng.permutation(6)])
    a = exact_spectrum(PairingSpec(6, 0.6, 3, eps))
    b = exact_spectrum(PairingSpec(6, 0.6, 3, perm))
    assert np.allclose(a, b, atol=1e-10)


def test_oracle_guard():
    with pytest.raises(OracleGuardError):
        exact_spectrum(PairingSpec(14, 0.5, 7))


def test_hf_energy(spec):
    assert hf_energy(spec) == pytest.approx(18.0)
    assert hf_energy(spec.with_g(0.0)) == pytest.approx(2 * (1 + 2 + 3 + 4))
    s = PairingSpec(5, 0.3, 2, (2.0, 0.5, 3.0, 1.0, 4.0))
    assert expectation(hf_state(s), hamiltonian_chains(s)) == pytest.approx(hf_energy(s))
    assert hf_energy(s) == pytest.approx(2 * 0.5 - 0.3 + 2 * 1.0 - 0.3)


def test_correlation_error():
    assert correlation_error(5.0, 5.0, 7.0) == 0
    assert correlation_error(7.0, 5.0, 7.0) == pytest.approx(100)
    with pytest.raises(ZeroDivisionError):
        correlation_error(1.0, 2.0, 2.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hamiltonian_preserves_pair_number(seed):
    rng = np.random.default_rng(seed)
    spec = PairingSpec(6, float(rng.uniform(0.1, 1.5)), 3)
    basis = sector_basis(6, 3)
    amps = np.zeros(64, dtype=complex)
    amps[basis] = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    out = hamiltonian_chains(spec).apply(StateVector(amps, normalize=True))
    mask = np.ones(64, dtype=bool)
    mask[basis] = False
    assert np.max(np.abs(out[mask])) < 1e-12


def test_pauli_chain_matrix_matches_kron():
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    y = np.array([[0, -1j], [1j, 0]])
    # letters[q] acts on qubit q, which is the least significant factor for q = 0
    assert np.allclose(PauliChain("XZY").matrix(), np.kron(y, np.kron(z, x)))


def test_apply_pauli_and_dense_agree(rng):
    amps = random_state_amplitudes(4, rng)
    chain = PauliChain("YXIZ", 0.3)
    s = apply_pauli(StateVector(amps), chain)
    assert np.allclose(s.amplitudes, PauliChain("YXIZ").matrix() @ amps)
    obs = PauliChainSum([chain, PauliChain("ZZII", -1.2)])
    st_ = StateVector(amps)
    assert expectation(st_, obs) == pytest.approx(expectation(st_, obs, method="dense"), abs=1e-12)


def test_sampled_expectation_within_binomial_bound(rng):
    amps = random_state_amplitudes(3, rng)
    obs = PauliChainSum([PauliChain("XZI", 0.5), PauliChain("IYY", -0.7)])
    s = StateVector(amps)
    exact = expectation(s, obs)
    shots = 10_000
    est = sampled_expectation(s, obs, shots, rng)
    assert abs(est - exact) < 3 * (0.5 + 0.7) / np.sqrt(shots)
