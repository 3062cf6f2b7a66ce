"""Hybrid minimization of the BCS ansatz with a pair-number constraint.

Three flavours share one driver:

* ``BCS``  -- minimize ``<H - lambda (N_P - A_P)>`` on the unprojected state;
* ``QPAV`` -- same minimization, then report the projected energy;
* ``QVAP`` -- minimize the energy of the number-projected state directly.

The outer loop adjusts the per-pair multiplier ``lambda`` until
``|<N_P> - A_P| <= eps_tol``.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from math import pi

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .ansatz import AnsatzParams, expected_pairs, prepare_bcs
from .errors import ConvergenceError
from .pairing import PairingSpec, hamiltonian_chains, pair_number_chains
from .pauli import expectation, sampled_expectation
from .projection import post_select, projector_oracle
from .qstate import StateVector

__all__ = [
    "MODES",
    "OptimizationConfig",
    "OptResult",
    "cost",
    "initial_thetas",
    "initial_lambda",
    "minimize",
    "projected_state",
    "qpav_energy",
]

log = logging.getLogger(__name__)

MODES = ("BCS", "QPAV", "QVAP")
THETA_BOUNDS = (0.0, pi / 2)


@dataclass
class OptimizationConfig:
    mode: str = "QVAP"
    eps_tol: float = 1e-3
    lambda_0: float | None = None
    lambda_step: float = 1.0
    max_outer: int = 50
    xatol: float = 1e-6
    fatol: float = 1e-9
    max_evals: int = 200_000
    max_restarts: int = 8
    seed: int | None = None
    shots: int = 0
    qpe_in_loop: bool = False
    init_thetas: tuple[float, ...] | None = None
    init_smoothing: float = 0.3
    init_noise: float = 0.0

    def __post_init__(self):
        self.mode = str(self.mode).upper().replace("-", "")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.eps_tol > 0:
            raise ValueError("eps_tol must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")


@dataclass
class OptResult:
    mode: str
    thetas: np.ndarray
    lambda_: float
    energy: float
    expected_pairs: float
    sb_energy: float
    history: list[dict] = field(default_factory=list)
    inner_history: list[list[float]] = field(default_factory=list)
    evaluations: int = 0
    converged: bool = True

    @property
    def params(self) -> AnsatzParams:
        # the optimizer's multiplier is per pair; the Fermi energy is per particle
        return AnsatzParams(tuple(self.thetas), self.lambda_ / 2.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["thetas"] = [float(t) for t in self.thetas]
        return d


def projected_state(
    state: StateVector, n_pairs: int, *, qpe: bool = False, rng=None, n_q: int | None = None
) -> StateVector:
    """Project onto ``n_pairs`` pairs, by QPE post-selection or the amplitude filter."""
    if qpe:
        return post_select(state, n_pairs, n_q=n_q, rng=rng).projected
    return projector_oracle(state, n_pairs)


def _energy(state: StateVector, spec: PairingSpec, shots: int, rng) -> float:
    h = hamiltonian_chains(spec)
    if shots:
        return sampled_expectation(state, h, shots, rng)
    return expectation(state, h, method="dense")


def cost(
    thetas,
    lam: float,
    spec: PairingSpec,
    mode: str,
    *,
    shots: int = 0,
    rng=None,
    qpe_in_loop: bool = False,
) -> float:
    """``<H - lam (N_P - A_P)>`` on the trial state of ``mode``.

    In ``QVAP`` mode the state is projected first, so ``<N_P> = A_P`` and the
    multiplier term vanishes identically.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size != spec.n_levels:
        raise ValueError(f"{thetas.size} angles for {spec.n_levels} levels")
    state = prepare_bcs(AnsatzParams(tuple(thetas)))
    a_p = spec.target_pairs
    if mode.upper() == "QVAP":
        proj = projected_state(state, a_p, qpe=qpe_in_loop, rng=rng)
        n_p = expectation(proj, pair_number_chains(spec.n_levels), method="dense")
        return _energy(proj, spec, shots, rng) - lam * (n_p - a_p)
    return _energy(state, spec, shots, rng) - lam * (expected_pairs(thetas) - a_p)


def initial_thetas(spec: PairingSpec, smoothing: float = 0.3, noise: float = 0.0, rng=None) -> np.ndarray:
    """Hartree-Fock step profile pulled ``smoothing`` radians off the bounds."""
    order = np.argsort(spec.eps, kind="stable")
    th = np.full(spec.n_levels, pi / 2 - smoothing)
    th[order[: spec.target_pairs]] = smoothing
    if noise:
        th = th + noise * np.random.default_rng(rng).standard_normal(th.size)
    return np.clip(th, *THETA_BOUNDS)


def initial_lambda(spec: PairingSpec) -> float:
    """Per-pair multiplier halfway between the last filled and first empty HF pair energy."""
    e = np.sort(2.0 * spec.eps - spec.g)
    a = spec.target_pairs
    if a == 0:
        return float(e[0] - 1.0)
    if a == spec.n_levels:
        return float(e[-1] + 1.0)
    return float(0.5 * (e[a - 1] + e[a]))


class _Counter:
    def __init__(self, fn, budget):
        self.fn = fn
        self.n = 0
        self.budget = budget

    def __call__(self, x):
        self.n += 1
        if self.n > self.budget:
            raise ConvergenceError(f"objective evaluation budget {self.budget} exhausted")
        return self.fn(x)


def _nelder_mead(fn, x0, cfg: OptimizationConfig, trace: list[float]):
    """Bounded Nelder-Mead, restarted from the best vertex until it stops improving."""
    x = np.clip(np.asarray(x0, dtype=float), *THETA_BOUNDS)
    f = fn(x)
    trace.append(f)
    step = 0.2
    for _ in range(cfg.max_restarts):
        remaining = fn.budget - fn.n
        if remaining <= x.size + 1:
            break
        simplex = np.vstack([x] + [np.clip(x + step * e, *THETA_BOUNDS) for e in np.eye(x.size)])
        # a vertex clipped back onto x would flatten the simplex
        for i in range(1, len(simplex)):
            if np.allclose(simplex[i], x):
                simplex[i, i - 1] = np.clip(x[i - 1] - step, *THETA_BOUNDS)

        def record(intermediate_result):
            trace.append(float(intermediate_result.fun))

        res = _scipy_minimize(
            fn,
            x,
            method="Nelder-Mead",
            bounds=[THETA_BOUNDS] * x.size,
            callback=record,
            options={
                "xatol": cfg.xatol,
                "fatol": cfg.fatol,
                "initial_simplex": simplex,
                "maxfev": remaining,
                "adaptive": True,
            },
        )
        improved = f - res.fun
        if res.fun <= f:
            x, f = np.asarray(res.x), float(res.fun)
        if improved <= cfg.fatol:
            break
        step = max(step / 4.0, 10 * cfg.xatol)
    return x, f


def minimize(spec: PairingSpec, config: OptimizationConfig | None = None) -> OptResult:
    """Run the hybrid loop for ``config.mode`` and return the converged angles.

    Raises :class:`ConvergenceError` when ``max_outer`` multiplier updates do
    not bring ``<N_P>`` within ``eps_tol`` of the target.
    """
    cfg = config or OptimizationConfig()
    rng = np.random.default_rng(cfg.seed)
    mode = cfg.mode
    inner_mode = "QVAP" if mode == "QVAP" else "BCS"
    a_p = spec.target_pairs
    if cfg.init_thetas is not None:
        thetas = np.asarray(cfg.init_thetas, dtype=float)
        if thetas.size != spec.n_levels:
            raise ValueError("init_thetas length does not match the model")
    else:
        thetas = initial_thetas(spec, cfg.init_smoothing, cfg.init_noise, rng)
    lam = initial_lambda(spec) if cfg.lambda_0 is None else float(cfg.lambda_0)
    history: list[dict] = []
    traces: list[list[float]] = []
    evals = 0
    n_pairs = float("nan")
    energy = float("nan")
    converged = False

    for outer in range(cfg.max_outer):
        fn = _Counter(
            lambda th, lam=lam: cost(
                th, lam, spec, inner_mode, shots=cfg.shots, rng=rng, qpe_in_loop=cfg.qpe_in_loop
            ),
            cfg.max_evals - evals,
        )
        trace: list[float] = []
        thetas, _ = _nelder_mead(fn, thetas, cfg, trace)
        traces.append(trace)
        evals += fn.n
        state = prepare_bcs(AnsatzParams(tuple(thetas)))
        if inner_mode == "QVAP":
            proj = projected_state(state, a_p)
            n_pairs = expectation(proj, pair_number_chains(spec.n_levels))
            energy = expectation(proj, hamiltonian_chains(spec))
        else:
            n_pairs = expected_pairs(thetas)
            energy = expectation(state, hamiltonian_chains(spec))
        history.append({"iteration": outer, "lambda": lam, "energy": energy, "expected_pairs": n_pairs})
        log.debug("outer %d: lambda=%.6f E=%.9f <N_P>=%.6f", outer, lam, energy, n_pairs)
        if abs(n_pairs - a_p) <= cfg.eps_tol:
            converged = True
            break
        if evals >= cfg.max_evals:
            break
        lam = lam + cfg.lambda_step * (a_p - n_pairs)

    result = OptResult(
        mode=mode,
        thetas=thetas,
        lambda_=lam,
        energy=energy,
        expected_pairs=n_pairs,
        sb_energy=energy if inner_mode == "BCS" else expectation(
            prepare_bcs(AnsatzParams(tuple(thetas))), hamiltonian_chains(spec)
        ),
        history=history,
        inner_history=traces,
        evaluations=evals,
        converged=converged,
    )
    if not converged:
        err = ConvergenceError(
            f"{mode}: <N_P>={n_pairs:.6f} not within {cfg.eps_tol:g} of {a_p} after "
            f"{len(history)} updates and {evals} evaluations"
        )
        err.result = result
        raise err
    if mode == "QPAV":
        result.energy = qpav_energy(spec, result, qpe=cfg.qpe_in_loop, rng=rng)
    return result


def qpav_energy(spec: PairingSpec, bcs_result: OptResult, *, qpe: bool = False, rng=None) -> float:
    """Energy of the converged BCS state after projection onto ``A_P`` pairs."""
    state = prepare_bcs(AnsatzParams(tuple(bcs_result.thetas)))
    proj = projected_state(state, spec.target_pairs, qpe=qpe, rng=rng)
    return expectation(proj, hamiltonian_chains(spec))
