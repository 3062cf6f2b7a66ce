"""Estimator-style front ends over the functional API.

Constructor arguments are stored verbatim (so ``get_params``/``set_params``
and ``clone`` from scikit-learn work); all computation happens in ``fit``
and fitted state lives in trailing-underscore attributes.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import krylov as _krylov
from . import spectra as _spectra
from . import vqe as _vqe
from ._validation import check_is_fitted, check_positive_int, check_spec, check_state
from .projection import min_ancillas, post_select, projector_oracle

__all__ = ["PairingVQE", "NumberProjector", "QPESpectrometer", "KrylovSolver"]


class PairingVQE(BaseEstimator):
    """Hybrid BCS / QPAV / QVAP minimization for one pairing model."""

    def __init__(
        self,
        mode: str = "QVAP",
        eps_tol: float = 1e-3,
        lambda_0: float | None = None,
        lambda_step: float = 1.0,
        max_outer: int = 50,
        shots: int = 0,
        qpe_in_loop: bool = False,
        random_state: int | None = None,
    ):
        self.mode = mode
        self.eps_tol = eps_tol
        self.lambda_0 = lambda_0
        self.lambda_step = lambda_step
        self.max_outer = max_outer
        self.shots = shots
        self.qpe_in_loop = qpe_in_loop
        self.random_state = random_state

    def fit(self, spec, y=None):
        spec = check_spec(spec)
        cfg = _vqe.OptimizationConfig(
            mode=self.mode,
            eps_tol=self.eps_tol,
            lambda_0=self.lambda_0,
            lambda_step=self.lambda_step,
            max_outer=self.max_outer,
            shots=self.shots,
            qpe_in_loop=self.qpe_in_loop,
            seed=self.random_state,
        )
        self.result_ = _vqe.minimize(spec, cfg)
        self.spec_ = spec
        self.thetas_ = np.asarray(self.result_.thetas)
        self.energy_ = self.result_.energy
        self.lambda_ = self.result_.lambda_
        return self

    def state(self, projected: bool | None = None):
        """Trial state at the fitted angles; projected by default unless in BCS mode."""
        check_is_fitted(self, "result_")
        from .ansatz import prepare_bcs

        sb = prepare_bcs(self.result_.params)
        if projected is None:
            projected = self.result_.mode != "BCS"
        return projector_oracle(sb, self.spec_.target_pairs) if projected else sb


class NumberProjector(TransformerMixin, BaseEstimator):
    """Stateless transformer projecting a register onto ``n_pairs`` pairs.

    ``method="qpe"`` post-selects phase-estimation readouts; ``"oracle"``
    applies the amplitude filter.
    """

    def __init__(self, n_pairs: int = 4, method: str = "qpe", n_q: int | None = None,
                 max_attempts: int = 1000, random_state: int | None = None):
        self.n_pairs = n_pairs
        self.method = method
        self.n_q = n_q
        self.max_attempts = max_attempts
        self.random_state = random_state

    def fit(self, state=None, y=None):
        if self.method not in ("qpe", "oracle"):
            raise ValueError(f"method must be 'qpe' or 'oracle', got {self.method!r}")
        check_positive_int(self.n_pairs, "n_pairs", minimum=0)
        self.rng_ = np.random.default_rng(self.random_state)
        return self

    def transform(self, state):
        if not hasattr(self, "rng_"):
            self.fit()
        state = check_state(state)
        if self.n_q is not None and self.n_q < min_ancillas(state.n_qubits):
            raise ValueError("too few ancillas for this register")
        if self.method == "oracle":
            self.last_outcome_ = None
            return projector_oracle(state, self.n_pairs)
        self.last_outcome_ = post_select(state, self.n_pairs, self.n_q, self.max_attempts, self.rng_)
        return self.last_outcome_.projected


class QPESpectrometer(BaseEstimator):
    """Phase-estimation energy histogram of an initial state."""

    def __init__(self, n_q: int = 8, e_min: float = 0.0, e_max: float | None = None,
                 calibrate: bool = True, shots: int = 0, dt: float = 1e-2,
                 method: str = "trotter", random_state: int | None = None):
        self.n_q = n_q
        self.e_min = e_min
        self.e_max = e_max
        self.calibrate = calibrate
        self.shots = shots
        self.dt = dt
        self.method = method
        self.random_state = random_state

    def fit(self, initial, spec):
        spec = check_spec(spec)
        initial = check_state(initial, spec.n_levels)
        n_q = check_positive_int(self.n_q, "n_q")
        e_max = self.e_max
        if e_max is None:
            e_max = _spectra.calibrated_emax(spec, n_q) if self.calibrate else _spectra.default_emax(spec)
        self.histogram_ = _spectra.qpe_spectrum(
            initial, spec, n_q, self.e_min, e_max, self.shots,
            _spectra.TrotterConfig(self.dt, self.method), self.random_state,
        )
        self.peaks_ = self.histogram_.peaks()
        return self


class KrylovSolver(BaseEstimator):
    """Quantum-Krylov generalized eigenproblem over a time-evolved basis."""

    def __init__(self, m_max: int = 20, d_tau: float = 0.3, threshold: float = 1e-6,
                 shots: int = 0, dt: float = 1e-2, method: str = "trotter",
                 two_sided: bool = False, random_state: int | None = None):
        self.m_max = m_max
        self.d_tau = d_tau
        self.threshold = threshold
        self.shots = shots
        self.dt = dt
        self.method = method
        self.two_sided = two_sided
        self.random_state = random_state

    def _config(self) -> _krylov.KrylovConfig:
        return _krylov.KrylovConfig(
            m_max=check_positive_int(self.m_max, "m_max"),
            d_tau=self.d_tau,
            threshold=self.threshold,
            shots=self.shots,
            trotter=_spectra.TrotterConfig(self.dt, self.method),
            seed=self.random_state,
            two_sided=self.two_sided,
        )

    def fit(self, initial, spec):
        spec = check_spec(spec)
        initial = check_state(initial, spec.n_levels)
        self.result_ = _krylov.krylov_scan(initial, spec, self._config())
        self.eigenvalues_ = self.result_.records[-1].eigenvalues
        return self

    def predict(self, m: int | None = None) -> float:
        """Ground-state estimate using the first ``m`` basis states (all by default)."""
        check_is_fitted(self, "result_")
        rec = self.result_.records[-1] if m is None else self.result_.record(m)
        return float(rec.eigenvalues[0])
