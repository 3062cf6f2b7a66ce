"""Statevector simulation of symmetry-breaking and symmetry-restoring
variational methods for the pairing Hamiltonian, with phase-estimation
spectra and quantum-Krylov diagonalization checked against exact
diagonalization."""
from .ansatz import AnsatzParams, prepare_bcs, prepare_qp_excited
from .errors import ConfigError, ConvergenceError, EmptySectorError, OracleGuardError, PairqcError
from .estimators import KrylovSolver, NumberProjector, PairingVQE, QPESpectrometer
from .krylov import KrylovConfig, KrylovResult, krylov_scan, qp_krylov_scan
from .pairing import PairingSpec, exact_spectrum, hamiltonian_chains, hf_energy, hf_state
from .pauli import PauliChain, PauliChainSum
from .projection import number_projection_qpe, post_select, projector_oracle
from .qstate import StateVector
from .spectra import SpectrumHistogram, TrotterConfig, qpe_spectrum
from .vqe import OptimizationConfig, OptResult, minimize

__version__ = "0.1.0"

__all__ = [
    "AnsatzParams", "prepare_bcs", "prepare_qp_excited",
    "ConfigError", "ConvergenceError", "EmptySectorError", "OracleGuardError", "PairqcError",
    "KrylovSolver", "NumberProjector", "PairingVQE", "QPESpectrometer",
    "KrylovConfig", "KrylovResult", "krylov_scan", "qp_krylov_scan",
    "PairingSpec", "exact_spectrum", "hamiltonian_chains", "hf_energy", "hf_state",
    "PauliChain", "PauliChainSum",
    "number_projection_qpe", "post_select", "projector_oracle",
    "StateVector",
    "SpectrumHistogram", "TrotterConfig", "qpe_spectrum",
    "OptimizationConfig", "OptResult", "minimize",
]
