"""Pauli chains and weighted sums of them.

A chain is written as a string with one letter per qubit, ``letters[q]``
acting on qubit ``q`` (qubit order, not the reversed print order some
toolkits use).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

import numpy as np

from .qstate import StateVector, _bit_mask, _check_qubits

__all__ = ["PauliChain", "PauliChainSum", "apply_pauli", "expectation", "sampled_expectation"]

_LETTERS = frozenset("IXYZ")


@lru_cache(maxsize=4096)
def _action(n: int, flip: int, z: int, n_y: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n, dtype=np.int64)
    parity = np.zeros(idx.size, dtype=np.int64)
    bits = idx & z
    while np.any(bits):
        parity ^= bits & 1
        bits >>= 1
    # Y = i X Z: phase i^{n_y} (-1)^{popcount(idx & z)}
    phase = (1j**n_y) * (1 - 2 * parity)
    tgt = idx ^ flip
    tgt.setflags(write=False)
    phase.setflags(write=False)
    return tgt, phase


@dataclass(frozen=True)
class PauliChain:
    """``coeff * P_0 (x) P_1 (x) ...`` with ``P_q`` in ``{I, X, Y, Z}``."""

    letters: str
    coeff: complex = 1.0

    def __post_init__(self):
        bad = set(self.letters) - _LETTERS
        if bad or not self.letters:
            raise ValueError(f"invalid Pauli letters {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @cached_property
    def _masks(self) -> tuple[int, int, int]:
        flip = z = 0
        n_y = 0
        for q, ch in enumerate(self.letters):
            if ch in "XY":
                flip |= 1 << q
            if ch in "YZ":
                z |= 1 << q
            n_y += ch == "Y"
        return flip, z, n_y

    def action(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Index map and phase with ``(P psi)[target[i]] = phase[i] * psi[i]``.

        The coefficient is not included.
        """
        if n != self.n_qubits:
            raise ValueError(f"chain of length {self.n_qubits} on a {n}-qubit register")
        return _action(n, *self._masks)

    def matrix(self) -> np.ndarray:
        n = self.n_qubits
        tgt, phase = self.action(n)
        m = np.zeros((1 << n, 1 << n), dtype=complex)
        m[tgt, np.arange(1 << n)] = phase
        return self.coeff * m

    def with_coeff(self, coeff: complex) -> "PauliChain":
        return PauliChain(self.letters, coeff)


class PauliChainSum:
    """Weighted sum ``sum_l beta_l V_l`` of Pauli chains on a fixed register."""

    def __init__(self, terms: Iterable[PauliChain]):
        self.terms: list[PauliChain] = list(terms)
        if not self.terms:
            raise ValueError("empty Pauli sum")
        sizes = {t.n_qubits for t in self.terms}
        if len(sizes) != 1:
            raise ValueError(f"chains of mixed lengths {sorted(sizes)}")
        self.n_qubits = sizes.pop()

    def __iter__(self) -> Iterator[PauliChain]:
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"PauliChainSum({len(self.terms)} terms on {self.n_qubits} qubits)"

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms])

    def l1_norm(self, *, include_identity: bool = True) -> float:
        """``sum_l |beta_l|``, optionally skipping the all-identity chain."""
        return float(
            sum(abs(t.coeff) for t in self.terms if include_identity or set(t.letters) != {"I"})
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(complex(t.coeff).imag) <= tol for t in self.terms)

    def matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix; meant for registers of a dozen qubits or fewer."""
        if self.n_qubits > 14:
            raise ValueError("dense matrix requested for more than 14 qubits")
        return sum(t.matrix() for t in self.terms)

    @cached_property
    def _dense(self) -> np.ndarray:
        return self.matrix()

    def apply(self, state: StateVector) -> np.ndarray:
        """``O |psi>`` as a raw amplitude array (not normalized)."""
        out = np.zeros_like(state.amplitudes)
        for t in self.terms:
            tgt, phase = t.action(state.n_qubits)
            out[tgt] += t.coeff * phase * state.amplitudes
        return out


def apply_pauli(state: StateVector, chain: PauliChain, controls=()) -> StateVector:
    """Apply the unitary letters of ``chain`` (coefficient ignored), optionally controlled."""
    tgt, phase = chain.action(state.n_qubits)
    amps = state.amplitudes
    if not controls:
        new = np.empty_like(amps)
        new[tgt] = phase * amps
    else:
        ctl = _check_qubits(state, controls, "control")
        if any(chain.letters[c] != "I" for c in ctl):
            raise ValueError("controlled chain acts non-trivially on a control qubit")
        mask = _bit_mask(state, ctl)
        new = amps.copy()
        new[tgt[mask]] = phase[mask] * amps[mask]
    state.amplitudes = new
    return state


def _chain_expectation(state: StateVector, chain: PauliChain) -> complex:
    tgt, phase = chain.action(state.n_qubits)
    a = state.amplitudes
    return complex(np.vdot(a[tgt], phase * a))


def expectation(state: StateVector, obs: PauliChainSum | PauliChain, *, method: str = "chains") -> float:
    """``<psi| O |psi>`` for a Hermitian Pauli sum.

    ``method="chains"`` accumulates ``beta_l <V_l>`` term by term;
    ``method="dense"`` contracts a cached dense matrix (same number, faster
    inside optimization loops on small registers).
    """
    if isinstance(obs, PauliChain):
        obs = PauliChainSum([obs])
    if obs.n_qubits != state.n_qubits:
        raise ValueError(f"observable on {obs.n_qubits} qubits, state on {state.n_qubits}")
    a = state.amplitudes
    if method == "dense":
        val = complex(np.vdot(a, obs._dense @ a))
    elif method == "chains":
        val = sum(t.coeff * _chain_expectation(state, t) for t in obs.terms)
    else:
        raise ValueError(f"unknown method {method!r}")
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; observable not Hermitian")
    return float(val.real)


def sampled_expectation(state: StateVector, obs: PauliChainSum, shots: int, rng) -> float:
    """Shot-noise estimate: each chain measured ``shots`` times in its eigenbasis."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    total = 0.0
    for t in obs.terms:
        if set(t.letters) == {"I"}:
            total += float(np.real(t.coeff))
            continue
        mean = _chain_expectation(state, t).real
        p_plus = min(max((1.0 + mean) / 2.0, 0.0), 1.0)
        n_plus = rng.binomial(shots, p_plus)
        total += float(np.real(t.coeff)) * (2.0 * n_plus - shots) / shots
    return total
