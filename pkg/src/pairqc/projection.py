"""Pair-number projection by phase estimation, and an amplitude-filter oracle."""
from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .errors import EmptySectorError
from .qstate import (
    StateVector,
    apply_hadamard,
    apply_phase,
    inverse_qft,
    measure_register,
    new_state,
    register_probabilities,
    tensor,
)

__all__ = [
    "ProjectionOutcome",
    "min_ancillas",
    "hamming_weights",
    "sector_weight",
    "projector_oracle",
    "qpe_circuit",
    "number_projection_qpe",
    "post_select",
]

SECTOR_EPS = 1e-14


@dataclass
class ProjectionOutcome:
    measured_pairs: int
    projected: StateVector
    attempts: int = 1
    acceptance_probability: float = 1.0


def min_ancillas(n_levels: int) -> int:
    """Smallest ``n_q`` with ``2**n_q > N``, so pair counts ``0..N`` stay distinct phases."""
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    return int(n_levels).bit_length()


def hamming_weights(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    w = np.zeros_like(idx)
    for q in range(n):
        w += (idx >> q) & 1
    return w


def sector_weight(system: StateVector, n_pairs: int) -> float:
    """``<psi|P|psi>`` for the pair-number-``n_pairs`` projector."""
    mask = hamming_weights(system.n_qubits) == n_pairs
    return float(np.sum(np.abs(system.amplitudes[mask]) ** 2))


def projector_oracle(system: StateVector, n_pairs: int) -> StateVector:
    """Zero every amplitude outside Hamming weight ``n_pairs`` and renormalize."""
    mask = hamming_weights(system.n_qubits) == n_pairs
    amps = np.where(mask, system.amplitudes, 0.0)
    w = float(np.sum(np.abs(amps) ** 2))
    if w <= SECTOR_EPS:
        raise EmptySectorError(f"sector with {n_pairs} pairs has weight {w:.3e}")
    return StateVector(amps / sqrt(w))


def qpe_circuit(system: StateVector, n_q: int) -> StateVector:
    """Run the counting circuit up to (not including) the ancilla measurement.

    System qubits keep indices ``0..N-1``; ancilla ``j`` is qubit ``N + j``
    and carries bit ``j`` of the readout. The controlled ``V^(2^j)`` with
    ``V = exp(2 pi i N_P / 2^n_q)`` is a controlled phase on every system
    qubit.
    """
    n = system.n_qubits
    if n_q < min_ancillas(n):
        raise ValueError(f"{n_q} ancillas cannot resolve pair numbers 0..{n} (need {min_ancillas(n)})")
    full = tensor(new_state(n_q), system)
    anc = [n + j for j in range(n_q)]
    for a in anc:
        apply_hadamard(full, a)
    for j, a in enumerate(anc):
        angle = 2.0 * pi * (1 << j) / (1 << n_q)
        for p in range(n):
            apply_phase(full, p, angle, controls=[a])
    inverse_qft(full, anc)
    return full


def _system_part(full: StateVector, n_sys: int, outcome: int) -> StateVector:
    block = full.amplitudes.reshape(-1, 1 << n_sys)[outcome]
    return StateVector(block / np.linalg.norm(block))


def number_projection_qpe(system: StateVector, n_q: int | None = None, rng=None) -> ProjectionOutcome:
    """One shot of phase-estimation projection.

    The readout integer is the pair number itself, and the system collapses
    onto that sector. ``acceptance_probability`` holds the Born weight of
    the observed outcome.
    """
    n = system.n_qubits
    n_q = min_ancillas(n) if n_q is None else int(n_q)
    rng = np.random.default_rng(rng)
    full = qpe_circuit(system, n_q)
    anc = [n + j for j in range(n_q)]
    probs = register_probabilities(full, anc)
    outcome, collapsed = measure_register(full, anc, rng)
    return ProjectionOutcome(
        measured_pairs=outcome,
        projected=_system_part(collapsed, n, outcome),
        attempts=1,
        acceptance_probability=float(probs[outcome]),
    )


def post_select(
    system: StateVector,
    target: int,
    n_q: int | None = None,
    max_attempts: int = 1000,
    rng=None,
) -> ProjectionOutcome:
    """Repeat QPE projection on fresh copies until the readout equals ``target``.

    Copying the input stands in for re-preparing it on hardware.
    ``acceptance_probability`` is successes over attempts.
    """
    n = system.n_qubits
    if not 0 <= target <= n:
        raise ValueError(f"target {target} outside [0, {n}]")
    rng = np.random.default_rng(rng)
    for attempt in range(1, max_attempts + 1):
        out = number_projection_qpe(system.copy(), n_q, rng)
        if out.measured_pairs == target:
            out.attempts = attempt
            out.acceptance_probability = 1.0 / attempt
            return out
    weight = sector_weight(system, target)
    raise EmptySectorError(
        f"no {target}-pair outcome in {max_attempts} attempts (sector weight {weight:.3e})"
    )
