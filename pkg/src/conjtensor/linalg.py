"""Hermitian eigendecomposition by cyclic complex Jacobi rotations."""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DimensionError


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum((off.conj() * off).real)))


def hermitian_eig(M, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Parameters
    ----------
    M : array_like
        Square matrix; only its Hermitian part ``(M + M^H)/2`` is used.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol * max(1, ||M||)``.
    max_sweeps : int

    Returns
    -------
    w : ndarray of float
    V : ndarray of complex
        Columns are eigenvectors, ``M @ V = V @ diag(w)``.
    """
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    A = (A + A.conj().T) / 2
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    target = tol * max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        if _off_norm(A) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (A[q, q].real - A[p, p].real) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1 + tau * tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # G = [[c, s*phase], [-s*conj(phase), c]] on rows/cols p, q
                gp = c
                gq = s * phase
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = ap * gp - aq * (s * phase.conjugate())
                A[:, q] = ap * gq + aq * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = rp * gp - rq * (s * phase)
                A[q, :] = rp * gq.conjugate() + rq * c
                A[p, q] = 0
                A[q, p] = 0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = vp * gp - vq * (s * phase.conjugate())
                V[:, q] = vp * gq + vq * c
    else:
        if _off_norm(A) > target:
            raise ConvergenceError("Jacobi sweeps did not converge", _off_norm(A))
    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]
