from math import pi

import numpy as np
import pytest

from pairqc.ansatz import AnsatzParams, prepare_bcs
from pairqc.errors import ConvergenceError
from pairqc.pairing import PairingSpec, exact_spectrum, hamiltonian_chains, hf_energy
from pairqc.pauli import expectation
from pairqc.projection import hamming_weights, sector_weight
from pairqc.vqe import OptimizationConfig, cost, initial_lambda, initial_thetas, minimize, qpav_energy


def test_config_validation():
    assert OptimizationConfig(mode="q-vap").mode == "QVAP"
    for bad in ({"mode": "x"}, {"eps_tol": 0}, {"max_outer": 0}, {"shots": -1}):
        with pytest.raises(ValueError):
            OptimizationConfig(**bad)


def test_non_interacting_limit_reaches_hf():
    spec = PairingSpec(4, 0.0, 2)
    res = minimize(spec, OptimizationConfig(mode="BCS"))
    assert res.energy == pytest.approx(hf_energy(spec), abs=1e-8)
    assert res.expected_pairs == pytest.approx(2, abs=1e-3)


def test_lambda_term_vanishes_at_target(spec):
    th = np.full(8, pi / 4)  # sum cos^2 = 4
    e0 = cost(th, 0.0, spec, "BCS")
    assert cost(th, 3.7, spec, "BCS") == pytest.approx(e0, abs=1e-12)


def test_qvap_cost_is_lambda_independent(spec, rng):
    th = rng.uniform(0.2, 1.3, 8)
    assert cost(th, -5.0, spec, "QVAP") == pytest.approx(cost(th, 5.0, spec, "QVAP"), abs=1e-12)


def test_cost_shape_check(spec):
    with pytest.raises(ValueError):
        cost(np.zeros(3), 0.0, spec, "BCS")


def test_initial_guess(spec):
    th = initial_thetas(spec)
    assert np.allclose(th[:4], 0.3) and np.allclose(th[4:], pi / 2 - 0.3)
    assert initial_lambda(spec) == pytest.approx(0.5 * ((2 * 4 - 0.5) + (2 * 5 - 0.5)))


def test_variational_chain_reference_point(spec, converged):
    e_gs = exact_spectrum(spec)[0]
    e_vap, e_pav, e_bcs = (converged[m].energy for m in ("QVAP", "QPAV", "BCS"))
    assert e_gs <= e_vap + 1e-9 <= e_pav + 2e-9
    assert e_pav < e_bcs
    for res in converged.values():
        assert abs(res.expected_pairs - 4) <= 1e-3
        assert res.converged


def test_qpav_matches_ratio_identity(spec, converged):
    res = converged["BCS"]
    s = prepare_bcs(AnsatzParams(tuple(res.thetas)))
    mask = hamming_weights(8) == 4
    h = hamiltonian_chains(spec)
    ratio = (h.apply(s)[mask] @ s.amplitudes[mask].conj()).real / sector_weight(s, 4)
    assert qpav_energy(spec, res) == pytest.approx(ratio, abs=1e-10)
    assert converged["QPAV"].energy == pytest.approx(ratio, abs=1e-9)


def test_history_and_traces(converged):
    res = converged["QVAP"]
    assert res.history and set(res.history[0]) == {"iteration", "lambda", "energy", "expected_pairs"}
    for trace in res.inner_history:
        assert np.all(np.diff(trace) <= 1e-12)
    d = res.to_dict()
    assert [float(t) for t in d["thetas"]] == list(res.thetas)


def test_fermi_energy_is_half_multiplier(converged):
    res = converged["BCS"]
    assert res.params.fermi_energy == pytest.approx(res.lambda_ / 2)


def test_deterministic_given_seed():
    spec = PairingSpec(5, 0.6, 2)
    cfg = OptimizationConfig(mode="BCS", seed=3, init_noise=0.05)
    a, b = minimize(spec, cfg), minimize(spec, cfg)
    assert np.array_equal(a.thetas, b.thetas) and a.energy == b.energy


def test_asymmetric_filling_converges():
    spec = PairingSpec(6, 0.8, 2)
    res = minimize(spec, OptimizationConfig(mode="BCS"))
    assert abs(res.expected_pairs - 2) <= 1e-3
    assert len(res.history) > 1
    lam = [h["lambda"] for h in res.history]
    assert lam[0] != lam[-1]


def test_outer_loop_exhaustion_raises():
    spec = PairingSpec(6, 0.8, 2)
    with pytest.raises(ConvergenceError) as info:
        minimize(spec, OptimizationConfig(mode="BCS", max_outer=1))
    assert info.value.result.history


def test_degenerate_level_permutation():
    a = minimize(PairingSpec(4, 0.6, 2, (1.0, 1.0, 2.0, 3.0)), OptimizationConfig(mode="QVAP"))
    b = minimize(PairingSpec(4, 0.6, 2, (1.0, 2.0, 1.0, 3.0)), OptimizationConfig(mode="QVAP"))
    assert a.energy == pytest.approx(b.energy, abs=1e-7)


def test_qpe_in_loop_matches_oracle_projection():
    spec = PairingSpec(4, 0.5, 2)
    ref = minimize(spec, OptimizationConfig(mode="QVAP"))
    lit = minimize(spec, OptimizationConfig(mode="QVAP", qpe_in_loop=True, seed=1))
    assert lit.energy == pytest.approx(ref.energy, abs=1e-7)


def test_sampled_energy_mode_runs():
    spec = PairingSpec(3, 0.5, 1)
    # tolerances sized to the shot noise of the energy estimate
    cfg = OptimizationConfig(mode="BCS", shots=2000, seed=0, max_evals=20_000, max_restarts=1,
                             eps_tol=0.05, xatol=0.05, fatol=0.2)
    res = minimize(spec, cfg)
    assert abs(res.expected_pairs - 1) <= 0.05
    with pytest.raises(ConvergenceError):
        minimize(spec, OptimizationConfig(mode="BCS", shots=2000, seed=0, max_evals=300, eps_tol=1e-4))
