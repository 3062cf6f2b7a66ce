"""Input checks shared by the estimator wrappers and the CLI."""
from __future__ import annotations

import numpy as np

from .pairing import PairingSpec
from .qstate import StateVector

__all__ = ["check_spec", "check_state", "check_positive_int", "check_is_fitted"]


def check_spec(spec) -> PairingSpec:
    if isinstance(spec, PairingSpec):
        return spec
    if isinstance(spec, dict):
        return PairingSpec.from_dict(spec)
    raise TypeError(f"expected PairingSpec or mapping, got {type(spec).__name__}")


def check_state(state, n_qubits: int | None = None) -> StateVector:
    if not isinstance(state, StateVector):
        state = StateVector(np.asarray(state, dtype=complex), normalize=True)
    if n_qubits is not None and state.n_qubits != n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, expected {n_qubits}")
    return state


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_is_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise AttributeError(f"{type(estimator).__name__} is not fitted yet; call fit first")
