"""Dense Hermitian eigensolvers.

``hermitian_eigen`` is a cyclic Jacobi solver for complex Hermitian
matrices; ``solve_generalized`` handles the overlap-pruned generalized
problem ``H c = E O c`` by canonical orthonormalization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

__all__ = ["EigenResult", "hermitian_eigen", "solve_generalized", "is_hermitian"]

HERMITIAN_TOL = 1e-10
NEGATIVE_OVERLAP_TOL = 1e-10


@dataclass
class EigenResult:
    """Eigenpairs sorted by ascending eigenvalue.

    Attributes
    ----------
    eigenvalues : ndarray of float, shape (J,)
    eigenvectors : ndarray of complex, shape (M, J)
        Columns are eigenvectors. For a generalized problem they are the
        coefficients in the original (possibly non-orthogonal) basis.
    retained_dim : int
        Number J of directions kept; equals M for a standard problem.
    ortho_vectors : ndarray or None
        For a generalized problem, the eigenvectors expressed in the
        orthonormalized basis built from the retained overlap eigenpairs.
    overlap_eigenvalues : ndarray or None
        Full ascending spectrum of the overlap matrix (generalized only).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    retained_dim: int
    ortho_vectors: np.ndarray | None = None
    overlap_eigenvalues: np.ndarray | None = field(default=None, repr=False)


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * scale)


def _check_square_hermitian(a, name="A") -> np.ndarray:
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    if not is_hermitian(a):
        raise ValueError(f"{name} is not Hermitian within {HERMITIAN_TOL:g}")
    return a


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diagonal(a))
    return float(np.linalg.norm(off))


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        return np.real(np.diagonal(a)).copy(), v
    target = tol * scale
    for _ in range(max_sweeps):
        if _off_norm(a) < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300 or r < 1e-18 * scale:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + sqrt(zeta * zeta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                # unitary on (p, q): phase-align a_pq, then a real rotation
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ g
                a[:, p] = cols[:, 0]
                a[:, q] = cols[:, 1]
                rows = g.conj().T @ a[[p, q], :]
                a[p, :] = rows[0]
                a[q, :] = rows[1]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vc = v[:, [p, q]] @ g
                v[:, p] = vc[:, 0]
                v[:, q] = vc[:, 1]
    else:
        if _off_norm(a) >= target:
            raise RuntimeError("Jacobi iteration did not converge")
    return np.real(np.diagonal(a)).copy(), v


def hermitian_eigen(a, *, tol: float = 1e-12, max_sweeps: int = 100) -> EigenResult:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Iterates sweeps until the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``. Eigenvalues come back real and ascending.
    """
    a = _check_square_hermitian(a)
    w, v = _jacobi(a, tol, max_sweeps)
    order = np.argsort(w, kind="stable")
    return EigenResult(eigenvalues=w[order], eigenvectors=v[:, order], retained_dim=len(w))


def solve_generalized(h, o, threshold: float = 1e-6) -> EigenResult:
    """Solve ``H c = E O c`` discarding overlap eigenvalues ``<= threshold``.

    The overlap matrix is diagonalized first; each retained eigenvector is
    scaled by ``1/sqrt(lambda_i)`` to form an orthonormal basis, and ``H`` is
    diagonalized in that basis. Overlap eigenvalues in ``(-1e-10, 0]`` are
    treated as zero; anything more negative raises, since it means the
    estimated overlap is not a Gram matrix.
    """
    h = _check_square_hermitian(h, "H")
    o = _check_square_hermitian(o, "O")
    if h.shape != o.shape:
        raise ValueError(f"H and O differ in shape: {h.shape} vs {o.shape}")
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    ov = hermitian_eigen(o)
    lam = ov.eigenvalues
    if lam.size and lam[0] < -NEGATIVE_OVERLAP_TOL:
        raise ValueError(
            f"overlap matrix has eigenvalue {lam[0]:.3e} < -{NEGATIVE_OVERLAP_TOL:g}; "
            "estimator noise is too large"
        )
    keep = lam > threshold
    m = h.shape[0]
    if not np.any(keep):
        return EigenResult(
            eigenvalues=np.empty(0),
            eigenvectors=np.empty((m, 0), dtype=complex),
            retained_dim=0,
            ortho_vectors=np.empty((0, 0), dtype=complex),
            overlap_eigenvalues=lam,
        )
    x = ov.eigenvectors[:, keep] / np.sqrt(lam[keep])
    hp = x.conj().T @ h @ x
    inner = hermitian_eigen(0.5 * (hp + hp.conj().T))
    return EigenResult(
        eigenvalues=inner.eigenvalues,
        eigenvectors=x @ inner.eigenvectors,
        retained_dim=int(np.count_nonzero(keep)),
        ortho_vectors=inner.eigenvectors,
        overlap_eigenvalues=lam,
    )
