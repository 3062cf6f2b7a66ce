"""Quantum-Krylov diagonalization in a basis of time-evolved states.

The basis is ``|Phi_k> = U(tau_k)|Psi>`` on the grid ``tau_k = k d_tau``.
Overlap and Hamiltonian matrices come from Hadamard tests on one ancilla
(qubit ``N``, above the system register); on a uniform grid both are
Hermitian Toeplitz, so only ``F_k = <Psi|U(k d_tau)|Psi>`` and
``G_k = <Psi|H U(k d_tau)|Psi>`` are measured.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Callable, Sequence

import numpy as np

from .ansatz import AnsatzParams, prepare_bcs, prepare_qp_excited
from .linalg import solve_generalized
from .pairing import PairingSpec, exact_spectrum, hamiltonian_chains, hf_energy, correlation_error
from .pauli import PauliChain, PauliChainSum, apply_pauli
from .projection import projector_oracle
from .qstate import (
    StateVector,
    apply_hadamard,
    apply_phase,
    new_state,
    register_probabilities,
    tensor,
)
from .spectra import TrotterConfig, evolve

__all__ = [
    "KrylovConfig",
    "KrylovRecord",
    "KrylovResult",
    "hadamard_test",
    "generating_values",
    "generating_values_at",
    "assemble",
    "assemble_dense",
    "assemble_two_sided",
    "krylov_scan",
    "qp_krylov_scan",
]

Evolution = Callable[[StateVector, Sequence[int]], object]


@dataclass(frozen=True)
class KrylovConfig:
    m_max: int = 20
    d_tau: float = 0.3
    threshold: float = 1e-6
    shots: int = 0
    trotter: TrotterConfig = field(default_factory=TrotterConfig)
    seed: int | None = None
    # estimate every <Phi_i|V_l|Phi_j> instead of relying on the Toeplitz shortcut;
    # keeps the GEVP variational when the basis comes from Trotterized evolution
    two_sided: bool = False

    def __post_init__(self):
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if not self.d_tau > 0:
            raise ValueError("d_tau must be positive")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")

    @property
    def taus(self) -> np.ndarray:
        return self.d_tau * np.arange(self.m_max)


@dataclass
class KrylovRecord:
    m: int
    retained_dim: int
    eigenvalues: np.ndarray
    err_gs: float
    err_1st: float
    pruning_event: bool


@dataclass
class KrylovResult:
    records: list[KrylovRecord]
    F: np.ndarray
    G: np.ndarray
    exact: np.ndarray
    e_hf: float
    d_tau: float
    label: str = ""

    def gs_estimates(self) -> np.ndarray:
        return np.array([r.eigenvalues[0] if r.retained_dim else np.nan for r in self.records])

    def record(self, m: int) -> KrylovRecord:
        return self.records[m - 1]

    def total_time(self, m: int) -> float:
        """Longest propagation needed for an ``m``-state basis: ``tau_{m-1}``."""
        return (m - 1) * self.d_tau

    def first_m_below(self, err_percent: float) -> int | None:
        for r in self.records:
            if r.err_gs < err_percent:
                return r.m
        return None


def _readout(prepared: StateVector, ancilla: int, observable: PauliChain | None, part: str, shots: int, rng) -> float:
    full = prepared.copy()
    if observable is not None:
        apply_pauli(full, PauliChain(observable.letters + "I" * (full.n_qubits - observable.n_qubits)), [ancilla])
    if part == "imag":
        apply_phase(full, ancilla, -pi / 2)
    apply_hadamard(full, ancilla)
    p0 = float(register_probabilities(full, [ancilla])[0])
    p0 = min(max(p0, 0.0), 1.0)
    if shots:
        n0 = int(rng.binomial(shots, p0))
        return (2.0 * n0 - shots) / shots
    return 2.0 * p0 - 1.0


def _prepare(initial: StateVector) -> tuple[StateVector, int]:
    n = initial.n_qubits
    full = tensor(new_state(1), initial)
    apply_hadamard(full, n)
    return full, n


def hadamard_test(
    initial: StateVector,
    evolution: Evolution | None = None,
    observable: PauliChain | None = None,
    part: str = "real",
    shots: int = 0,
    rng=None,
) -> float:
    """Estimate ``Re`` or ``Im`` of ``<Psi| A W |Psi>`` as ``p0 - p1`` on one ancilla.

    ``evolution(state, controls)`` applies the controlled ``W`` in place;
    ``observable`` is a single Pauli chain ``A`` (identity when ``None``).
    The imaginary part uses the phase gate ``R(-pi/2)`` on the ancilla.
    """
    if part not in ("real", "imag"):
        raise ValueError("part must be 'real' or 'imag'")
    if isinstance(observable, PauliChainSum):
        raise TypeError("observable must be a single Pauli chain; split sums term by term")
    if observable is not None and observable.n_qubits != initial.n_qubits:
        raise ValueError("observable length does not match the system register")
    rng = np.random.default_rng(rng)
    full, anc = _prepare(initial)
    if evolution is not None:
        evolution(full, [anc])
    return _readout(full, anc, observable, part, shots, rng)


def _values_from_prepared(prepared, anc, chains: PauliChainSum, shots, rng) -> tuple[complex, complex]:
    def z(obs):
        return complex(
            _readout(prepared, anc, obs, "real", shots, rng),
            _readout(prepared, anc, obs, "imag", shots, rng),
        )

    f = z(None)
    g = 0.0j
    for term in chains:
        if set(term.letters) == {"I"}:
            g += term.coeff * f
        else:
            g += term.coeff * z(term)
    return f, g


def generating_values(initial: StateVector, spec: PairingSpec, config: KrylovConfig | None = None):
    """``(F, G)`` for ``k = 0..m_max-1`` from Hadamard tests.

    The controlled evolution is extended one ``d_tau`` at a time. ``F_0`` is
    set to the known norm, 1.
    """
    cfg = config or KrylovConfig()
    rng = np.random.default_rng(cfg.seed)
    chains = hamiltonian_chains(spec)
    prepared, anc = _prepare(initial)
    F = np.zeros(cfg.m_max, dtype=complex)
    G = np.zeros(cfg.m_max, dtype=complex)
    for k in range(cfg.m_max):
        if k:
            evolve(prepared, cfg.d_tau, cfg.trotter, spec, controls=[anc])
        F[k], G[k] = _values_from_prepared(prepared, anc, chains, cfg.shots, rng)
    F[0] = 1.0
    return F, G


def generating_values_at(initial: StateVector, spec: PairingSpec, times, config: KrylovConfig | None = None):
    """``F(t), G(t)`` at arbitrary non-negative times, each from a fresh circuit."""
    cfg = config or KrylovConfig()
    rng = np.random.default_rng(cfg.seed)
    chains = hamiltonian_chains(spec)
    F, G = [], []
    for t in times:
        prepared, anc = _prepare(initial)
        evolve(prepared, float(t), cfg.trotter, spec, controls=[anc])
        f, g = _values_from_prepared(prepared, anc, chains, cfg.shots, rng)
        F.append(f)
        G.append(g)
    return np.array(F), np.array(G)


def assemble(F, G, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian Toeplitz ``O_ij = F_{j-i}``, ``H_ij = G_{j-i}`` (``j >= i``)."""
    F = np.asarray(F)
    G = np.asarray(G)
    if m > min(F.size, G.size):
        raise ValueError(f"need {m} generating values, have {min(F.size, G.size)}")
    o = np.empty((m, m), dtype=complex)
    h = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            o[i, j] = F[j - i]
            h[i, j] = G[j - i]
            o[j, i] = np.conj(F[j - i])
            h[j, i] = np.conj(G[j - i])
    for i in range(m):
        o[i, i] = o[i, i].real
        h[i, i] = h[i, i].real
    return o, h


def assemble_dense(initial: StateVector, spec: PairingSpec, taus, config: KrylovConfig | None = None):
    """Overlap and Hamiltonian matrices on an arbitrary sorted time grid."""
    taus = np.asarray(taus, dtype=float)
    m = taus.size
    diffs = sorted({round(float(taus[j] - taus[i]), 12) for i in range(m) for j in range(i, m)})
    F, G = generating_values_at(initial, spec, diffs, config)
    lookup = {d: (f, g) for d, f, g in zip(diffs, F, G)}
    o = np.empty((m, m), dtype=complex)
    h = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            f, g = lookup[round(float(taus[j] - taus[i]), 12)]
            if i == j:
                f, g = 1.0, g.real
            o[i, j], h[i, j] = f, g
            o[j, i], h[j, i] = np.conj(f), np.conj(g)
    return o, h


def _branch_state(bra: StateVector, ket: StateVector) -> tuple[StateVector, int]:
    # ancilla in |0> carries the bra branch, |1> the ket branch
    n = bra.n_qubits
    amps = np.concatenate([bra.amplitudes, ket.amplitudes]) / np.sqrt(2.0)
    return StateVector(amps), n


def assemble_two_sided(initial: StateVector, spec: PairingSpec, m: int, config: KrylovConfig | None = None):
    """Overlap and Hamiltonian matrices from Hadamard tests on both branches.

    Each element ``<Phi_i|V_l|Phi_j>`` comes from a test whose ancilla-``0``
    branch evolves to ``tau_i`` and ancilla-``1`` branch to ``tau_j``. No
    commutation between ``H`` and the propagator is assumed.
    """
    cfg = config or KrylovConfig()
    rng = np.random.default_rng(cfg.seed)
    chains = hamiltonian_chains(spec)
    basis = [initial.copy()]
    for _ in range(1, m):
        basis.append(evolve(basis[-1].copy(), cfg.d_tau, cfg.trotter, spec))
    o = np.eye(m, dtype=complex)
    h = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            prepared, anc = _branch_state(basis[i], basis[j])
            f, g = _values_from_prepared(prepared, anc, chains, cfg.shots, rng)
            if i == j:
                f, g = 1.0, g.real
            o[i, j], h[i, j] = f, g
            o[j, i], h[j, i] = np.conj(f), np.conj(g)
    return o, h


def _nearest_excited(eigs: np.ndarray, target: float) -> float:
    if eigs.size < 2:
        return float("nan")
    rest = eigs[1:]
    return float(rest[np.argmin(np.abs(rest - target))])


def krylov_scan(
    initial: StateVector, spec: PairingSpec, config: KrylovConfig | None = None, *, label: str = ""
) -> KrylovResult:
    """Solve the pruned generalized eigenproblem for every basis size ``M = 1..m_max``.

    Errors are percent of correlation energy against the sector oracle. The
    first-excited estimate is the retained eigenvalue above the lowest that is
    closest to the exact first excited energy.
    """
    cfg = config or KrylovConfig()
    F, G = generating_values(initial, spec, cfg)
    full = assemble_two_sided(initial, spec, cfg.m_max, cfg) if cfg.two_sided else None
    exact = exact_spectrum(spec)
    e_hf = hf_energy(spec)
    records = []
    pruned_prev = 0
    for m in range(1, cfg.m_max + 1):
        if full is None:
            o, h = assemble(F, G, m)
        else:
            o, h = full[0][:m, :m], full[1][:m, :m]
        o = 0.5 * (o + o.conj().T)
        res = solve_generalized(h, o, cfg.threshold)
        pruned = m - res.retained_dim
        if res.retained_dim:
            err_gs = correlation_error(res.eigenvalues[0], exact[0], e_hf)
            e1 = _nearest_excited(res.eigenvalues, exact[1]) if exact.size > 1 else float("nan")
            err_1 = correlation_error(e1, exact[1], e_hf) if np.isfinite(e1) and exact[1] != e_hf else float("nan")
        else:
            err_gs = err_1 = float("nan")
        records.append(
            KrylovRecord(
                m=m,
                retained_dim=res.retained_dim,
                eigenvalues=res.eigenvalues,
                err_gs=err_gs,
                err_1st=err_1,
                pruning_event=pruned > pruned_prev,
            )
        )
        pruned_prev = pruned
    return KrylovResult(records, F, G, exact, e_hf, cfg.d_tau, label)


def qp_krylov_scan(
    spec: PairingSpec,
    converged: AnsatzParams | Sequence[float],
    excitation_set=(),
    config: KrylovConfig | None = None,
) -> KrylovResult:
    """Krylov scan seeded by a projected 2k-quasiparticle state on fixed angles."""
    thetas = converged.thetas if isinstance(converged, AnsatzParams) else tuple(converged)
    exc = tuple(excitation_set)
    params = AnsatzParams(thetas, excitation_set=exc)
    sb = prepare_qp_excited(params) if exc else prepare_bcs(params)
    initial = projector_oracle(sb, spec.target_pairs)
    label = "qp" + "-".join(str(i) for i in exc) if exc else "qvap"
    return krylov_scan(initial, spec, config, label=label)
