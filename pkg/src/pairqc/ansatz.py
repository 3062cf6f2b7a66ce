"""BCS product-state ansatz and its quasiparticle-excited variants.

Each level carries the factor ``sin(theta_p)|0_p> + cos(theta_p)|1_p>``,
prepared as ``R_Y(pi - 2 theta_p)`` on the vacuum, so all amplitudes are
real. A quasiparticle excitation on level ``i`` replaces the factor by
``-cos(theta_i)|0_i> + sin(theta_i)|1_i>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .pairing import PairingSpec
from .qstate import StateVector, apply_ry, new_state

__all__ = [
    "AnsatzParams",
    "prepare_bcs",
    "prepare_qp_excited",
    "expected_pairs",
    "bcs_energy",
    "pairing_gap",
    "quasiparticle_energies",
    "mean_field_excitation_energy",
]


@dataclass(frozen=True)
class AnsatzParams:
    """Angles of the BCS state.

    ``fermi_energy`` is the single-particle Fermi energy used for
    quasiparticle energies; the hybrid optimizer's multiplier acts per pair
    and equals twice this value.
    """

    thetas: tuple[float, ...]
    fermi_energy: float = 0.0
    excitation_set: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        exc = tuple(int(i) for i in self.excitation_set)
        if len(set(exc)) != len(exc):
            raise ValueError(f"duplicate excitation indices {exc}")
        if any(not 0 <= i < len(self.thetas) for i in exc):
            raise ValueError(f"excitation indices {exc} out of range")
        object.__setattr__(self, "excitation_set", exc)

    @property
    def n_levels(self) -> int:
        return len(self.thetas)

    def excited(self, *levels: int) -> "AnsatzParams":
        return AnsatzParams(self.thetas, self.fermi_energy, tuple(levels))


def _register(params: AnsatzParams, register: int | None) -> int:
    n = params.n_levels if register is None else int(register)
    if n != params.n_levels:
        raise ValueError(f"{params.n_levels} angles for a {n}-qubit register")
    return n


def prepare_bcs(params: AnsatzParams, register: int | None = None) -> StateVector:
    """BCS vacuum from per-qubit ``R_Y(pi - 2 theta_p)`` rotations."""
    if params.excitation_set:
        raise ValueError("prepare_bcs takes no excitations; use prepare_qp_excited")
    n = _register(params, register)
    state = new_state(n)
    for p, th in enumerate(params.thetas):
        apply_ry(state, p, pi - 2.0 * th)
    return state


def prepare_qp_excited(params: AnsatzParams, register: int | None = None) -> StateVector:
    """2k-quasiparticle state built with the BCS circuit on shifted angles.

    Shifting ``theta_i -> theta_i + pi/2`` yields ``-1`` times the excited
    factor; the sign is restored here so the factor reads exactly
    ``-cos(theta_i)|0> + sin(theta_i)|1>``.
    """
    if not params.excitation_set:
        raise ValueError("prepare_qp_excited needs a nonempty excitation set")
    n = _register(params, register)
    thetas = list(params.thetas)
    for i in params.excitation_set:
        thetas[i] += pi / 2.0
    state = new_state(n)
    for p, th in enumerate(thetas):
        apply_ry(state, p, pi - 2.0 * th)
    if len(params.excitation_set) % 2:
        state.amplitudes *= -1.0
    return state


def expected_pairs(params: AnsatzParams | np.ndarray) -> float:
    """``<N_P> = sum_p cos^2(theta_p)`` of the unprojected BCS state."""
    th = np.asarray(params.thetas if isinstance(params, AnsatzParams) else params, dtype=float)
    return float(np.sum(np.cos(th) ** 2))


def bcs_energy(spec: PairingSpec, thetas) -> float:
    """Closed-form ``<H>`` of the BCS product state.

    ``sum_p (2 eps_p - g) v_p^2 - g sum_{p != q} u_p v_p u_q v_q`` with
    ``u = sin(theta)``, ``v = cos(theta)``.
    """
    th = np.asarray(thetas, dtype=float)
    u, v = np.sin(th), np.cos(th)
    uv = u * v
    return float(np.sum((2.0 * spec.eps - spec.g) * v**2) - spec.g * (np.sum(uv) ** 2 - np.sum(uv**2)))


def pairing_gap(spec: PairingSpec, thetas) -> float:
    """``Delta = g sum_p sin(theta_p) cos(theta_p)``."""
    th = np.asarray(thetas, dtype=float)
    return float(spec.g * np.sum(np.sin(th) * np.cos(th)))


def quasiparticle_energies(spec: PairingSpec, params: AnsatzParams, gap: float | None = None) -> np.ndarray:
    """``sqrt((eps_i - lambda)^2 + Delta^2)`` for every level."""
    delta = pairing_gap(spec, params.thetas) if gap is None else float(gap)
    return np.sqrt((spec.eps - params.fermi_energy) ** 2 + delta**2)


def mean_field_excitation_energy(
    spec: PairingSpec, params: AnsatzParams, excitation_set=(), *, gap: float | None = None
) -> float:
    """BCS energy plus twice the quasiparticle energies of the excited levels.

    Reporting only: the gap defaults to the value implied by the angles.
    """
    e0 = bcs_energy(spec, params.thetas)
    exc = tuple(excitation_set)
    if not exc:
        return e0
    qp = quasiparticle_energies(spec, params, gap)
    return e0 + 2.0 * float(sum(qp[i] for i in exc))
