"""Dense kernels: Cholesky factorization, Householder QR, symmetric eigensolver.

These are the small dense building blocks the solvers lean on.  The
factorizations are backed by LAPACK (through numpy/scipy); the contracts
on top -- pivot thresholds, typed errors, ordering guarantees -- are ours.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EigenConvergenceError, NotSpdError, RankDeficientError

# Relative pivot threshold separating structural indefiniteness from roundoff.
PIVOT_RTOL = 1e-14


def _as_symmetric(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if M.size:
        scale = np.abs(M).max()
        if scale > 0 and np.abs(M - M.T).max() > 1e-12 * scale:
            raise ValueError(f"{name} is not symmetric")
    return (M + M.T) / 2.0


@dataclass
class CholeskyFactor:
    """Lower triangular L with L @ L.T equal to the factored matrix."""

    lower: np.ndarray

    @property
    def n(self):
        return self.lower.shape[0]

    def solve(self, rhs):
        """Solve (L L^T) x = rhs for one vector or a matrix of columns."""
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.n:
            raise ValueError(f"rhs has leading dimension {rhs.shape[0]}, expected {self.n}")
        if self.n == 0:
            return np.zeros_like(rhs)
        y = scipy.linalg.solve_triangular(self.lower, rhs, lower=True)
        return scipy.linalg.solve_triangular(self.lower.T, y, lower=False)


def cholesky(M):
    """Factor a symmetric positive definite matrix as L @ L.T.

    Raises NotSpdError when LAPACK rejects the matrix or when any pivot
    falls at or below PIVOT_RTOL times the largest diagonal entry; the
    relative threshold keeps honest roundoff from masquerading as
    indefiniteness.
    """
    A = _as_symmetric(M)
    n = A.shape[0]
    if n == 0:
        return CholeskyFactor(np.zeros((0, 0)))
    dmax = float(A.diagonal().max(initial=0.0))
    if dmax <= 0.0:
        raise NotSpdError("diagonal has no positive entry")
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NotSpdError(f"Cholesky failed: {exc}") from exc
    pivots = np.diagonal(L) ** 2
    if pivots.min() <= PIVOT_RTOL * dmax:
        raise NotSpdError(
            f"pivot {pivots.min():.3e} at or below threshold {PIVOT_RTOL * dmax:.3e}"
        )
    return CholeskyFactor(L)


def chol_solve(factor, rhs):
    """Solve M x = rhs given the CholeskyFactor of M."""
    return factor.solve(rhs)


def householder_qr_orthogonal(G):
    """Orthogonal factor Q of the Householder QR of a square matrix G.

    Used to turn seeded Gaussian matrices into random orthogonal matrices.
    Raises RankDeficientError when a pivot column is numerically zero, so
    callers can redraw G.
    """
    A = np.array(G, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"G must be square, got shape {A.shape}")
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    scale = np.linalg.norm(A, "fro")
    if scale == 0.0:
        raise RankDeficientError("zero matrix")
    tol = 1e-13 * scale
    vs = []
    for j in range(n - 1):
        x = A[j:, j]
        normx = np.linalg.norm(x)
        if normx <= tol:
            raise RankDeficientError(f"column {j} is numerically dependent")
        v = x.copy()
        v[0] += np.copysign(normx, x[0] if x[0] != 0.0 else 1.0)
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            raise RankDeficientError(f"reflector for column {j} vanished")
        v /= vnorm
        A[j:, j:] -= 2.0 * np.outer(v, v @ A[j:, j:])
        vs.append(v)
    if abs(A[n - 1, n - 1]) <= tol:
        raise RankDeficientError("last pivot is numerically zero")
    Q = np.eye(n)
    for j in range(n - 2, -1, -1):
        v = vs[j]
        Q[j:, :] -= 2.0 * np.outer(v, v @ Q[j:, :])
    return Q


@dataclass
class SymEigen:
    """Full symmetric eigendecomposition; values ascending, vectors in columns."""

    values: np.ndarray
    vectors: np.ndarray


def sym_eigen(M):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix."""
    A = _as_symmetric(M)
    if A.shape[0] == 0:
        return SymEigen(np.zeros(0), np.zeros((0, 0)))
    try:
        values, vectors = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"symmetric eigensolver failed: {exc}") from exc
    return SymEigen(values, vectors)


def smallest_singular_value(M):
    """Smallest singular value of a rectangular matrix.

    Computed as sqrt of the smallest eigenvalue of M^T M (clamped at zero),
    which is all the generators need -- no full SVD.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"M must be 2-D, got shape {M.shape}")
    gram = M.T @ M
    eig = sym_eigen((gram + gram.T) / 2.0)
    if eig.values.size == 0:
        return 0.0
    return float(np.sqrt(max(float(eig.values[0]), 0.0)))
