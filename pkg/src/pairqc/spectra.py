"""Phase-estimation spectra of the pairing Hamiltonian.

Time evolution uses the first-order split ``U(dt) = U_eps(dt) U_g(dt)``:
a per-level phase ``exp(-i (2 eps_p - g) dt)`` on ``|1_p>`` and, for each
pair ``p > q``, a rotation by ``g dt`` mixing ``|01>`` and ``|10>``.

The evolved system must occupy qubits ``0..N-1``; control qubits sit above.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, cos, pi, sin

import numpy as np

from .pairing import PairingSpec, exact_propagator, exact_spectrum, full_eigen
from .qstate import (
    StateVector,
    apply_hadamard,
    apply_phase,
    inverse_qft,
    new_state,
    register_probabilities,
    tensor,
)

__all__ = [
    "TrotterConfig",
    "SpectrumHistogram",
    "trotter_step",
    "evolve",
    "n_trotter_steps",
    "qpe_spectrum",
    "qpe_distribution_oracle",
    "phase_to_energy",
    "energy_to_phase",
    "default_emax",
    "calibrated_emax",
    "qpe_resources",
]


@dataclass(frozen=True)
class TrotterConfig:
    """Integrator settings; ``method="exact"`` swaps in the dense propagator."""

    dt: float = 1e-2
    method: str = "trotter"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.method not in ("trotter", "exact"):
            raise ValueError(f"unknown evolution method {self.method!r}")


class _Kernel:
    """One split step on a batch of system vectors, shape ``(rows, 2**N)``."""

    def __init__(self, spec: PairingSpec, dt: float):
        n = spec.n_levels
        idx = np.arange(1 << n, dtype=np.int64)
        level_e = 2.0 * spec.eps - spec.g
        energy = np.zeros(idx.size)
        for p in range(n):
            energy += ((idx >> p) & 1) * level_e[p]
        self.n = n
        self.diag = np.exp(-1j * dt * energy)
        self.c = cos(spec.g * dt)
        self.s = 1j * sin(spec.g * dt)
        self.pairs = [(p, q) for p in range(n) for q in range(p)]

    def __call__(self, x: np.ndarray) -> None:
        rows = x.shape[0]
        n, c, s = self.n, self.c, self.s
        for p, q in self.pairs:
            y = x.reshape(rows, 1 << (n - 1 - p), 2, 1 << (p - 1 - q), 2, 1 << q)
            a = y[:, :, 1, :, 0, :]
            b = y[:, :, 0, :, 1, :]
            tmp = a.copy()
            a *= c
            a += s * b
            b *= c
            b += s * tmp
        x *= self.diag


_KERNELS: dict[tuple[PairingSpec, float], _Kernel] = {}


def _kernel(spec: PairingSpec, dt: float) -> _Kernel:
    key = (spec, float(dt))
    k = _KERNELS.get(key)
    if k is None:
        if len(_KERNELS) > 64:
            _KERNELS.clear()
        k = _KERNELS[key] = _Kernel(spec, dt)
    return k


def _check_system(state: StateVector, spec: PairingSpec, controls) -> list[int]:
    n = spec.n_levels
    if state.n_qubits < n:
        raise ValueError(f"register of {state.n_qubits} qubits cannot hold {n} levels")
    controls = [int(c) for c in controls]
    if any(not n <= c < state.n_qubits for c in controls) or len(set(controls)) != len(controls):
        raise ValueError(f"controls {controls} must be distinct qubits above the system register")
    return controls


def _rows(state: StateVector, spec: PairingSpec, controls: list[int]) -> np.ndarray | slice:
    n_hi = state.n_qubits - spec.n_levels
    if not controls:
        return slice(None)
    r = np.arange(1 << n_hi, dtype=np.int64)
    mask = np.ones(r.size, dtype=bool)
    for c in controls:
        mask &= ((r >> (c - spec.n_levels)) & 1).astype(bool)
    return np.flatnonzero(mask)


def trotter_step(state: StateVector, dt: float, spec: PairingSpec, controls=()) -> StateVector:
    """Apply ``U_eps(dt) U_g(dt)`` to the system register, optionally controlled."""
    controls = _check_system(state, spec, controls)
    x = state.amplitudes.reshape(-1, 1 << spec.n_levels)
    rows = _rows(state, spec, controls)
    block = np.ascontiguousarray(x[rows])
    _kernel(spec, dt)(block)
    x[rows] = block
    return state


def n_trotter_steps(tau: float, dt: float) -> int:
    # guard against tau/dt landing a hair above an integer
    return max(0, ceil(tau / dt - 1e-9))


def evolve(
    state: StateVector,
    tau: float,
    trotter: TrotterConfig | None,
    spec: PairingSpec,
    controls=(),
) -> StateVector:
    """Propagate the system register by ``exp(-i tau H)``.

    Trotterized: ``ceil(tau/dt)`` steps, the last one shortened so the total
    is exactly ``tau``.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    trotter = trotter or TrotterConfig()
    controls = _check_system(state, spec, controls)
    if tau == 0:
        return state
    x = state.amplitudes.reshape(-1, 1 << spec.n_levels)
    rows = _rows(state, spec, controls)
    block = np.ascontiguousarray(x[rows])
    if trotter.method == "exact":
        block = block @ exact_propagator(spec, tau).T
    else:
        steps = n_trotter_steps(tau, trotter.dt)
        full = _kernel(spec, trotter.dt)
        for _ in range(steps - 1):
            full(block)
        last = tau - (steps - 1) * trotter.dt
        if abs(last - trotter.dt) <= 1e-12 * trotter.dt:
            full(block)
        else:
            _kernel(spec, last)(block)
    x[rows] = block
    return state


def phase_to_energy(phi: float, e_min: float, e_max: float) -> float:
    """Energy read off a measured phase of ``V = exp(-2 pi i (H - E_min)/(E_max - E_min))``."""
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    return e_min + ((1.0 - phi) % 1.0) * (e_max - e_min)


def energy_to_phase(energy: float, e_min: float, e_max: float) -> float:
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    return (1.0 - (energy - e_min) / (e_max - e_min)) % 1.0


def default_emax(spec: PairingSpec) -> float:
    """``sum_p |2 eps_p - g| + |g| N (N-1) / 2``, the l1 norm of the Pauli coefficients."""
    n = spec.n_levels
    return float(np.sum(np.abs(2.0 * spec.eps - spec.g)) + abs(spec.g) * n * (n - 1) / 2.0)


def calibrated_emax(spec: PairingSpec, n_q: int, *, full_space: bool = False) -> float:
    """``E_max = top * 2^n_q / (2^n_q - 1)`` so the top eigenvalue sits in the first nonzero bin."""
    top = float(full_eigen(spec)[0].max()) if full_space else float(exact_spectrum(spec)[-1])
    m = 1 << n_q
    return top * m / (m - 1)


def qpe_resources(n_q: int, e_min: float, e_max: float) -> tuple[float, float, float]:
    """``(tau_qpe, delta_e, tau_total)`` for ``n_q`` ancillas."""
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    tau = 2.0 * pi / (e_max - e_min)
    delta_e = pi / (2 ** (n_q - 1) * tau)
    return tau, delta_e, (2**n_q - 1) * tau


@dataclass
class SpectrumHistogram:
    """QPE readout distribution with each outcome mapped to an energy."""

    n_q: int
    e_min: float
    e_max: float
    shots: int
    outcomes: np.ndarray
    energies: np.ndarray
    probabilities: np.ndarray
    counts: np.ndarray | None = None
    trotter_steps: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def bin_width(self) -> float:
        return (self.e_max - self.e_min) / (1 << self.n_q)

    def bins(self) -> dict[int, tuple[float, int, float]]:
        counts = self.counts if self.counts is not None else np.zeros(len(self.outcomes), dtype=int)
        return {
            int(m): (float(e), int(c), float(p))
            for m, e, c, p in zip(self.outcomes, self.energies, counts, self.probabilities)
        }

    def sorted_by_energy(self):
        order = np.argsort(self.energies, kind="stable")
        counts = self.counts if self.counts is not None else np.zeros(len(order), dtype=int)
        return self.energies[order], self.probabilities[order], counts[order]

    def peaks(self, threshold: float = 0.01) -> list[tuple[float, float]]:
        """Local maxima (cyclic in phase) with probability above ``threshold``."""
        p = self.probabilities
        out = []
        for i in range(len(p)):
            if p[i] > threshold and p[i] >= p[i - 1] and p[i] >= p[(i + 1) % len(p)]:
                out.append((float(self.energies[i]), float(p[i])))
        return sorted(out)

    def probability_near(self, energy: float) -> float:
        """Probability of the bin whose center is closest to ``energy``."""
        i = int(np.argmin(np.abs(self.energies - energy)))
        return float(self.probabilities[i])

    def peak_mass(self, energy: float, half_width: float) -> float:
        """Total probability of bins centered within ``half_width`` of ``energy``.

        A level between bin centers spreads over neighbouring bins; this sums
        the whole peak rather than its tallest bin.
        """
        mask = np.abs(self.energies - energy) < half_width
        return float(self.probabilities[mask].sum())


def qpe_spectrum(
    initial: StateVector,
    spec: PairingSpec,
    n_q: int,
    e_min: float = 0.0,
    e_max: float | None = None,
    shots: int = 0,
    trotter: TrotterConfig | None = None,
    rng=None,
) -> SpectrumHistogram:
    """Phase estimation of ``V = exp(-2 pi i (H - E_min)/(E_max - E_min))``.

    Ancilla ``j`` (qubit ``N + j``) controls evolution over ``2^j tau_QPE``
    plus the compensating phase ``exp(+i 2^j tau_QPE E_min)``. With
    ``shots=0`` the exact readout marginal is returned.
    """
    n = spec.n_levels
    if initial.n_qubits != n:
        raise ValueError(f"initial state has {initial.n_qubits} qubits, model has {n} levels")
    e_max = default_emax(spec) if e_max is None else float(e_max)
    trotter = trotter or TrotterConfig()
    tau_qpe, _, _ = qpe_resources(n_q, e_min, e_max)
    full = tensor(new_state(n_q), initial)
    anc = [n + j for j in range(n_q)]
    for a in anc:
        apply_hadamard(full, a)
    steps = 0
    for j, a in enumerate(anc):
        t = (1 << j) * tau_qpe
        evolve(full, t, trotter, spec, controls=[a])
        steps += n_trotter_steps(t, trotter.dt)
        if e_min != 0.0:
            apply_phase(full, a, t * e_min)
    inverse_qft(full, anc)
    probs = register_probabilities(full, anc)
    outcomes = np.arange(1 << n_q)
    energies = np.array([phase_to_energy(m / (1 << n_q), e_min, e_max) for m in outcomes])
    counts = None
    if shots > 0:
        rng = np.random.default_rng(rng)
        counts = rng.multinomial(shots, probs / probs.sum())
        probs = counts / shots
    return SpectrumHistogram(
        n_q=n_q,
        e_min=float(e_min),
        e_max=e_max,
        shots=int(shots),
        outcomes=outcomes,
        energies=energies,
        probabilities=probs,
        counts=counts,
        trotter_steps=steps if trotter.method == "trotter" else 0,
    )


def qpe_distribution_oracle(
    initial: StateVector, spec: PairingSpec, n_q: int, e_min: float, e_max: float
) -> np.ndarray:
    """Readout distribution from the eigen-decomposition (Dirichlet-kernel weights).

    Exact evolution is assumed; independent of the circuit simulation.
    """
    e, v = full_eigen(spec)
    weights = np.abs(v.conj().T @ initial.amplitudes) ** 2
    m = 1 << n_q
    phi = (-(e - e_min) / (e_max - e_min)) % 1.0
    k = np.arange(m)
    out = np.zeros(m)
    for w, ph in zip(weights, phi):
        if w < 1e-16:
            continue
        amp = np.exp(2j * pi * np.outer(ph - k / m, k)).sum(axis=1) / m
        out += w * np.abs(amp) ** 2
    return out
