"""Statevector register and gate application.

Bit ordering: qubit ``q`` is bit ``q`` of the basis-state integer, so the
amplitude of ``|s_{n-1} ... s_1 s_0>`` sits at index ``sum_q s_q 2**q``.
Multi-qubit matrices follow the same rule over their target list: the
first target is the least significant bit of the matrix index.

Gate functions mutate the state in place and return it.
"""
from __future__ import annotations

from math import cos, pi, sin, sqrt

import numpy as np

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "new_state",
    "apply_ry",
    "apply_hadamard",
    "apply_phase",
    "apply_unitary",
    "apply_diagonal",
    "qft",
    "inverse_qft",
    "register_probabilities",
    "measure_register",
    "inner_product",
    "tensor",
]

MAX_QUBITS = 24
UNITARY_TOL = 1e-10

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / sqrt(2.0)


class StateVector:
    """Pure state of ``n_qubits`` qubits held as a dense amplitude array."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, *, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size:
            raise ValueError(f"amplitude count {amps.size} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit cap")
        if normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps /= nrm
        self.n_qubits = n
        self.amplitudes = amps

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"

    def __len__(self):
        return self.amplitudes.size

    def copy(self) -> "StateVector":
        out = StateVector.__new__(StateVector)
        out.n_qubits = self.n_qubits
        out.amplitudes = self.amplitudes.copy()
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        """View as an ``n``-axis tensor; axis ``n-1-q`` belongs to qubit ``q``."""
        return self.amplitudes.reshape((2,) * self.n_qubits)


def new_state(n: int) -> StateVector:
    """The all-zero computational basis state on ``n`` qubits."""
    if not 1 <= int(n) <= MAX_QUBITS:
        raise ValueError(f"register size must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(1 << int(n), dtype=complex)
    amps[0] = 1.0
    return StateVector(amps)


def tensor(high: StateVector, low: StateVector) -> StateVector:
    """Product state with ``low`` on qubits ``0..n_low-1`` and ``high`` above."""
    return StateVector(np.kron(high.amplitudes, low.amplitudes))


def _check_qubits(state: StateVector, qubits, what="qubit") -> list[int]:
    qs = [int(q) for q in qubits]
    for q in qs:
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"{what} {q} out of range for {state.n_qubits} qubits")
    if len(set(qs)) != len(qs):
        raise ValueError(f"duplicate {what} indices in {qs}")
    return qs


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _apply_matrix(state: StateVector, targets: list[int], u: np.ndarray, controls: list[int]) -> None:
    n = state.n_qubits
    k = len(targets)
    t = state.tensor()
    index = [slice(None)] * n
    for c in controls:
        index[_axis(n, c)] = 1
    sub = t[tuple(index)]
    remaining = [ax for ax in range(n) if ax not in {_axis(n, c) for c in controls}]
    # matrix row/col axis j is target bit k-1-j
    in_axes = [remaining.index(_axis(n, targets[k - 1 - j])) for j in range(k)]
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, sub, axes=(list(range(k, 2 * k)), in_axes))
    sub[...] = np.moveaxis(out, list(range(k)), in_axes)


def apply_unitary(state: StateVector, targets, u, controls=(), *, check: bool = True) -> StateVector:
    """Apply ``u`` on ``targets`` wherever every control qubit is ``|1>``."""
    targets = _check_qubits(state, targets, "target")
    controls = _check_qubits(state, controls, "control")
    if set(targets) & set(controls):
        raise ValueError("control and target qubits overlap")
    u = np.asarray(u, dtype=complex)
    dim = 1 << len(targets)
    if u.shape != (dim, dim):
        raise ValueError(f"matrix shape {u.shape} does not match {len(targets)} targets")
    if check and np.max(np.abs(u.conj().T @ u - np.eye(dim))) > UNITARY_TOL:
        raise ValueError("matrix is not unitary within tolerance")
    _apply_matrix(state, targets, u, controls)
    return state


def ry_matrix(angle: float) -> np.ndarray:
    """``exp(-i Y angle / 2)``."""
    c, s = cos(angle / 2.0), sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def apply_ry(state: StateVector, q: int, angle: float) -> StateVector:
    _check_qubits(state, [q])
    _apply_matrix(state, [int(q)], ry_matrix(angle), [])
    return state


def apply_hadamard(state: StateVector, q: int) -> StateVector:
    _check_qubits(state, [q])
    _apply_matrix(state, [int(q)], _H, [])
    return state


def _bit_mask(state: StateVector, qubits) -> np.ndarray:
    idx = np.arange(len(state), dtype=np.int64)
    mask = np.ones(len(state), dtype=bool)
    for q in qubits:
        mask &= ((idx >> q) & 1).astype(bool)
    return mask


def apply_phase(state: StateVector, q: int, phi: float, controls=()) -> StateVector:
    """Multiply the ``|1>`` component of qubit ``q`` by ``exp(i phi)``.

    With controls this is the multi-controlled phase gate, which is
    symmetric in all the qubits involved.
    """
    qs = _check_qubits(state, [q, *controls])
    state.amplitudes[_bit_mask(state, qs)] *= np.exp(1j * phi)
    return state


def apply_diagonal(state: StateVector, phases: np.ndarray, controls=()) -> StateVector:
    """Multiply amplitudes by a full-register diagonal, restricted to controls."""
    phases = np.asarray(phases)
    if phases.shape != state.amplitudes.shape:
        raise ValueError("diagonal length does not match the register")
    if not controls:
        state.amplitudes *= phases
    else:
        mask = _bit_mask(state, _check_qubits(state, controls, "control"))
        state.amplitudes[mask] *= phases[mask]
    return state


def dft_matrix(n_q: int, sign: int) -> np.ndarray:
    m = 1 << n_q
    j = np.arange(m)
    return np.exp(sign * 2j * pi * np.outer(j, j) / m) / sqrt(m)


def qft(state: StateVector, register) -> StateVector:
    """``|k> -> 2**(-n/2) sum_m exp(+2 pi i m k / 2**n) |m>`` on ``register``.

    ``register[i]`` is bit ``i`` of the register integer.
    """
    reg = _check_qubits(state, register)
    _apply_matrix(state, reg, dft_matrix(len(reg), +1), [])
    return state


def inverse_qft(state: StateVector, register) -> StateVector:
    """Inverse of :func:`qft`."""
    reg = _check_qubits(state, register)
    _apply_matrix(state, reg, dft_matrix(len(reg), -1), [])
    return state


def _register_view(state: StateVector, register: list[int]) -> np.ndarray:
    """Amplitudes rearranged to shape ``(2**len(register), rest)``.

    Row ``r`` collects the amplitudes whose register bits spell ``r``.
    """
    n = state.n_qubits
    t = state.tensor()
    reg_axes = [_axis(n, q) for q in reversed(register)]
    rest = [ax for ax in range(n) if ax not in reg_axes]
    return np.transpose(t, reg_axes + rest).reshape(1 << len(register), -1)


def register_probabilities(state: StateVector, register) -> np.ndarray:
    """Marginal outcome distribution of ``register`` (index = register integer)."""
    reg = _check_qubits(state, register)
    return np.sum(np.abs(_register_view(state, reg)) ** 2, axis=1)


def measure_register(state: StateVector, register, rng, *, outcome: int | None = None):
    """Projective measurement of ``register``.

    Returns ``(outcome, collapsed)`` where ``collapsed`` is a new
    renormalized state over all qubits. Passing ``outcome`` forces that
    branch (post-selection) and raises if its probability vanishes.
    """
    reg = _check_qubits(state, register)
    probs = register_probabilities(state, reg)
    if outcome is None:
        p = probs / probs.sum()
        outcome = int(rng.choice(len(p), p=p))
    elif not 0 <= outcome < len(probs):
        raise ValueError(f"outcome {outcome} outside register range")
    if probs[outcome] <= 1e-300:
        raise ValueError(f"outcome {outcome} has zero probability")
    mask = np.ones(len(state), dtype=bool)
    idx = np.arange(len(state), dtype=np.int64)
    for i, q in enumerate(reg):
        mask &= ((idx >> q) & 1) == ((outcome >> i) & 1)
    amps = np.where(mask, state.amplitudes, 0.0)
    collapsed = StateVector(amps / sqrt(probs[outcome]))
    return outcome, collapsed


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"register sizes differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
