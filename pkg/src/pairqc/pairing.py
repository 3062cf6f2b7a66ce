"""Pairing Hamiltonian in the pair-level qubit encoding, plus its exact oracle.

Level ``p`` (0-based) is qubit ``p``; ``|1>`` means the pair level is
occupied. Energies are in units of the level spacing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import OracleGuardError
from .linalg import hermitian_eigen
from .pauli import PauliChain, PauliChainSum
from .qstate import StateVector

__all__ = [
    "PairingSpec",
    "hamiltonian_chains",
    "pair_number_chains",
    "sector_basis",
    "dense_sector_hamiltonian",
    "sector_eigen",
    "exact_spectrum",
    "hf_energy",
    "hf_occupation",
    "hf_state",
    "correlation_error",
    "full_eigen",
    "exact_propagator",
    "ORACLE_MAX_DIM",
]

ORACLE_MAX_DIM = 1000


@dataclass(frozen=True)
class PairingSpec:
    """Doubly degenerate levels ``epsilons`` with constant pairing ``g``.

    ``target_pairs`` is the pair number the methods aim at. With
    ``epsilons`` omitted the levels are equidistant, ``eps_p = p + 1``.
    """

    n_levels: int = 8
    g: float = 0.5
    target_pairs: int = 4
    epsilons: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if int(self.n_levels) < 1:
            raise ValueError("n_levels must be >= 1")
        eps = self.epsilons
        if eps is None:
            eps = tuple(float(p + 1) for p in range(self.n_levels))
        eps = tuple(float(e) for e in eps)
        if len(eps) != self.n_levels:
            raise ValueError(f"{len(eps)} level energies given for {self.n_levels} levels")
        if not 0 <= self.target_pairs <= self.n_levels:
            raise ValueError(f"target_pairs must lie in [0, {self.n_levels}]")
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "n_levels", int(self.n_levels))
        object.__setattr__(self, "target_pairs", int(self.target_pairs))
        object.__setattr__(self, "g", float(self.g))

    @property
    def eps(self) -> np.ndarray:
        return np.array(self.epsilons)

    def with_g(self, g: float) -> "PairingSpec":
        return PairingSpec(self.n_levels, g, self.target_pairs, self.epsilons)

    def to_dict(self) -> dict:
        return {
            "n_levels": self.n_levels,
            "g": self.g,
            "target_pairs": self.target_pairs,
            "epsilons": list(self.epsilons),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairingSpec":
        eps = d.get("epsilons")
        return cls(
            n_levels=int(d.get("n_levels", len(eps) if eps else 8)),
            g=float(d.get("g", 0.5)),
            target_pairs=int(d.get("target_pairs", 4)),
            epsilons=tuple(eps) if eps else None,
        )


def _chain(n: int, ops: dict[int, str], coeff: float) -> PauliChain:
    letters = ["I"] * n
    for q, ch in ops.items():
        letters[q] = ch
    return PauliChain("".join(letters), coeff)


@lru_cache(maxsize=128)
def hamiltonian_chains(spec: PairingSpec) -> PauliChainSum:
    """Qubit Hamiltonian as Pauli chains.

    ``H = sum_p (eps_p - g/2)(1 - Z_p) - g/2 sum_{p>q} (X_p X_q + Y_p Y_q)``,
    with the identity part gathered into a single constant chain.
    """
    n, g = spec.n_levels, spec.g
    shifted = spec.eps - g / 2.0
    terms = [_chain(n, {}, float(np.sum(shifted)))]
    terms += [_chain(n, {p: "Z"}, -float(shifted[p])) for p in range(n)]
    for p in range(n):
        for q in range(p):
            terms.append(_chain(n, {p: "X", q: "X"}, -g / 2.0))
            terms.append(_chain(n, {p: "Y", q: "Y"}, -g / 2.0))
    return PauliChainSum(terms)


@lru_cache(maxsize=32)
def pair_number_chains(n: int) -> PauliChainSum:
    """``N_P = sum_p (1 - Z_p) / 2``."""
    return PauliChainSum([_chain(n, {}, n / 2.0)] + [_chain(n, {p: "Z"}, -0.5) for p in range(n)])


@lru_cache(maxsize=128)
def sector_basis(n_levels: int, n_pairs: int) -> np.ndarray:
    """Basis-state integers of Hamming weight ``n_pairs``, ascending."""
    states = [sum(1 << p for p in occ) for occ in combinations(range(n_levels), n_pairs)]
    out = np.array(sorted(states), dtype=np.int64)
    out.setflags(write=False)
    return out


def _guard(n_levels: int, n_pairs: int) -> None:
    dim = comb(n_levels, n_pairs)
    if dim > ORACLE_MAX_DIM:
        raise OracleGuardError(f"sector dimension {dim} exceeds oracle guard {ORACLE_MAX_DIM}")


def dense_sector_hamiltonian(spec: PairingSpec, n_pairs: int | None = None) -> np.ndarray:
    """Hamiltonian on the fixed pair-number sector, built directly from occupations.

    Diagonal ``sum_occ (2 eps_p - g)``; ``-g`` between configurations that
    differ by moving one pair.
    """
    a = spec.target_pairs if n_pairs is None else int(n_pairs)
    _guard(spec.n_levels, a)
    basis = sector_basis(spec.n_levels, a)
    pos = {int(s): i for i, s in enumerate(basis)}
    dim = basis.size
    h = np.zeros((dim, dim), dtype=complex)
    level_e = 2.0 * spec.eps - spec.g
    for i, s in enumerate(basis):
        s = int(s)
        occ = [p for p in range(spec.n_levels) if s >> p & 1]
        h[i, i] = sum(level_e[p] for p in occ)
        for p in occ:
            for q in range(spec.n_levels):
                if not s >> q & 1:
                    h[pos[s ^ (1 << p) ^ (1 << q)], i] = -spec.g
    return h


@lru_cache(maxsize=256)
def _sector_eigen_cached(spec: PairingSpec, n_pairs: int):
    res = hermitian_eigen(dense_sector_hamiltonian(spec, n_pairs))
    res.eigenvalues.setflags(write=False)
    res.eigenvectors.setflags(write=False)
    return res


def sector_eigen(spec: PairingSpec, n_pairs: int | None = None):
    """Eigenpairs of the sector Hamiltonian (eigenvectors over :func:`sector_basis`)."""
    a = spec.target_pairs if n_pairs is None else int(n_pairs)
    _guard(spec.n_levels, a)
    return _sector_eigen_cached(spec, a)


def exact_spectrum(spec: PairingSpec, n_pairs: int | None = None) -> np.ndarray:
    """All sector eigenvalues, ascending."""
    return sector_eigen(spec, n_pairs).eigenvalues.copy()


def hf_occupation(spec: PairingSpec) -> list[int]:
    """Levels filled in the Hartree-Fock reference: the ``target_pairs`` lowest."""
    order = np.argsort(spec.eps, kind="stable")
    return sorted(int(p) for p in order[: spec.target_pairs])


def hf_energy(spec: PairingSpec) -> float:
    occ = hf_occupation(spec)
    return float(sum(2.0 * spec.epsilons[p] - spec.g for p in occ))


def hf_state(spec: PairingSpec) -> StateVector:
    amps = np.zeros(1 << spec.n_levels, dtype=complex)
    amps[sum(1 << p for p in hf_occupation(spec))] = 1.0
    return StateVector(amps)


def correlation_error(e_approx: float, e_exact: float, e_hf: float) -> float:
    """Percentage error on the correlation energy relative to the HF reference."""
    ec_exact = e_exact - e_hf
    if ec_exact == 0:
        raise ZeroDivisionError("exact correlation energy is zero")
    return abs(((e_approx - e_hf) - ec_exact) / ec_exact) * 100.0


@lru_cache(maxsize=32)
def full_eigen(spec: PairingSpec) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition over the whole ``2**N`` register, sector by sector.

    Returns ``(energies, vectors)`` with vectors as columns over the full
    computational basis; block structure follows from pair-number conservation.
    """
    n = spec.n_levels
    dim = 1 << n
    energies = []
    vectors = []
    for a in range(n + 1):
        basis = sector_basis(n, a)
        res = sector_eigen(spec, a)
        v = np.zeros((dim, basis.size), dtype=complex)
        v[basis, :] = res.eigenvectors
        energies.append(res.eigenvalues)
        vectors.append(v)
    e = np.concatenate(energies)
    v = np.concatenate(vectors, axis=1)
    e.setflags(write=False)
    v.setflags(write=False)
    return e, v


def exact_propagator(spec: PairingSpec, tau: float) -> np.ndarray:
    """Dense ``exp(-i tau H)`` over the full register."""
    e, v = full_eigen(spec)
    return (v * np.exp(-1j * tau * e)) @ v.conj().T
