"""Experiment payloads: each function returns a header and ordered rows.

Rows hold plain Python scalars so the CLI can write them to CSV and JSON
without further conversion.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzParams, prepare_bcs
from .krylov import KrylovConfig, KrylovResult, krylov_scan, qp_krylov_scan
from .pairing import PairingSpec, correlation_error, exact_spectrum, hf_energy, hf_state
from .projection import projector_oracle
from .spectra import TrotterConfig, calibrated_emax, qpe_resources, qpe_spectrum
from .vqe import OptimizationConfig, minimize

__all__ = [
    "Table",
    "INITIAL_STATES",
    "reference_states",
    "vqe_sweep",
    "qpe_spectra",
    "krylov_scans",
    "qp_krylov",
    "exact_table",
    "resources_report",
    "resource_match",
    "qpe_ancillas_for",
    "default_g_grid",
    "workers",
]

INITIAL_STATES = ("HF", "QPAV", "QVAP")
WORKERS_ENV = "PAIRQC_WORKERS"


@dataclass
class Table:
    header: list[str]
    rows: list[list]


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _map(fn, items):
    n = workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def reference_states(spec: PairingSpec, names=INITIAL_STATES, *, seed=None, qpe_in_loop=False):
    """Initial states keyed by name, plus the converged optimizer results used."""
    states, results = {}, {}
    for name in names:
        if name == "HF":
            states[name] = hf_state(spec)
            continue
        if name not in ("QPAV", "QVAP"):
            raise ValueError(f"unknown initial state {name!r}")
        res = minimize(spec, OptimizationConfig(mode=name, seed=seed, qpe_in_loop=qpe_in_loop))
        results[name] = res
        states[name] = projector_oracle(prepare_bcs(AnsatzParams(tuple(res.thetas))), spec.target_pairs)
    return states, results


def _f(x) -> float:
    return float(x)


def _sweep_point(args):
    spec, modes, seed, shots, qpe_in_loop = args
    exact = exact_spectrum(spec)[0]
    e_hf = hf_energy(spec)
    row = {"g": spec.g, "E_exact": exact, "E_HF": e_hf}
    for mode in modes:
        res = minimize(spec, OptimizationConfig(mode=mode, seed=seed, shots=shots, qpe_in_loop=qpe_in_loop))
        row[f"E_{mode}"] = res.energy
        row[f"err_{mode}"] = correlation_error(res.energy, exact, e_hf)
    return row


def vqe_sweep(base: PairingSpec, g_values, modes=("BCS", "QPAV", "QVAP"), *, seed=None, shots=0,
              qpe_in_loop=False) -> Table:
    points = [(base.with_g(float(g)), tuple(modes), seed, shots, qpe_in_loop) for g in g_values]
    rows = _map(_sweep_point, points)
    header = ["g"] + [f"err_{m}" for m in modes] + ["E_exact", "E_HF"] + [f"E_{m}" for m in modes]
    return Table(header, [[_f(r[h]) for h in header] for r in rows])


def qpe_spectra(spec: PairingSpec, n_q_values, initial=INITIAL_STATES, *, shots=0, dt=1e-2,
                method="trotter", seed=None, e_min=0.0) -> Table:
    states, _ = reference_states(spec, initial, seed=seed)
    rng = np.random.default_rng(seed)
    rows = []
    for n_q in n_q_values:
        e_max = calibrated_emax(spec, int(n_q))
        for name in initial:
            h = qpe_spectrum(states[name], spec, int(n_q), e_min, e_max, shots, TrotterConfig(dt, method), rng)
            counts = h.counts if h.counts is not None else np.zeros(h.outcomes.size, dtype=int)
            for m, e, p, c in zip(h.outcomes, h.energies, h.probabilities, counts):
                rows.append([int(n_q), name, int(m), _f(e), _f(p), int(c)])
    return Table(["n_q", "initial", "outcome", "energy", "probability", "count"], rows)


def _krylov_rows(label: str, res: KrylovResult, m_max: int) -> list[list]:
    rows = []
    for r in res.records:
        eigs = [_f(e) for e in r.eigenvalues] + [""] * (m_max - r.retained_dim)
        rows.append([label, r.m, r.retained_dim, *eigs, _f(r.err_gs), _f(r.err_1st), int(r.pruning_event)])
    return rows


def _krylov_header(m_max: int) -> list[str]:
    return ["initial", "M", "J"] + [f"E_{i}" for i in range(m_max)] + ["err_0", "err_1", "pruned"]


def krylov_scans(spec: PairingSpec, config: KrylovConfig, initial=INITIAL_STATES, *, seed=None):
    states, _ = reference_states(spec, initial, seed=seed)
    results = {name: krylov_scan(states[name], spec, config, label=name) for name in initial}
    rows = [row for name in initial for row in _krylov_rows(name, results[name], config.m_max)]
    return Table(_krylov_header(config.m_max), rows), results


def qp_krylov(spec: PairingSpec, config: KrylovConfig, excitation_set=(2,), *, seed=None) -> Table:
    """QVAP-vacuum scan followed by the scan from the projected quasiparticle state."""
    res = minimize(spec, OptimizationConfig(mode="QVAP", seed=seed))
    vac = qp_krylov_scan(spec, res.thetas, (), config)
    exc = qp_krylov_scan(spec, res.thetas, tuple(excitation_set), config)
    rows = _krylov_rows(vac.label, vac, config.m_max) + _krylov_rows(exc.label, exc, config.m_max)
    return Table(_krylov_header(config.m_max), rows)


def exact_table(spec: PairingSpec) -> Table:
    e = exact_spectrum(spec)
    return Table(["index", "energy"], [[i, _f(x)] for i, x in enumerate(e)])


def qpe_ancillas_for(spec: PairingSpec, accuracy_percent: float, e_min: float = 0.0) -> int:
    """Fewest ancillas whose bin width is within ``accuracy_percent`` of the correlation energy."""
    e_c = abs(exact_spectrum(spec)[0] - hf_energy(spec))
    target = accuracy_percent / 100.0 * e_c
    n = 1
    while True:
        _, delta_e, _ = qpe_resources(n, e_min, calibrated_emax(spec, n))
        if delta_e <= target:
            return n
        n += 1
        if n > 64:
            raise ValueError("accuracy target unreachable")


def resources_report(spec: PairingSpec, n_q_values, krylov: dict[str, KrylovResult] | None = None) -> Table:
    """QPE rows per ancilla count next to Krylov rows per basis size.

    ``err_percent`` is the QPE bin width as a percent of the correlation
    energy, or the achieved Krylov ground-state error.
    """
    e_c = abs(exact_spectrum(spec)[0] - hf_energy(spec))
    rows = []
    for n_q in n_q_values:
        tau, delta_e, total = qpe_resources(int(n_q), 0.0, calibrated_emax(spec, int(n_q)))
        rows.append(["qpe", "", int(n_q), _f(tau), _f(delta_e), _f(total), _f(100.0 * delta_e / e_c)])
    for name, res in (krylov or {}).items():
        for r in res.records:
            rows.append(["krylov", name, r.m, _f(res.d_tau), "", _f(res.total_time(r.m)), _f(r.err_gs)])
    return Table(["kind", "initial", "size", "tau_step", "delta_e", "tau_tot", "err_percent"], rows)


def resource_match(spec: PairingSpec, krylov: dict[str, KrylovResult], accuracy_percent: float = 1.0) -> Table:
    """Total evolution time each method needs for ``accuracy_percent`` ground-state accuracy."""
    n_q = qpe_ancillas_for(spec, accuracy_percent)
    _, _, qpe_total = qpe_resources(n_q, 0.0, calibrated_emax(spec, n_q))
    rows = []
    for name, res in krylov.items():
        m = res.first_m_below(accuracy_percent)
        qk = res.total_time(m) if m is not None else float("nan")
        rows.append([name, _f(accuracy_percent), n_q, _f(qpe_total), m if m is not None else "", _f(qk), _f(qk / qpe_total)])
    return Table(["initial", "accuracy_percent", "n_q", "tau_tot_qpe", "M", "tau_tot_krylov", "ratio"], rows)


def default_g_grid() -> list[float]:
    return [round(0.2 + 0.1 * i, 10) for i in range(11)]
