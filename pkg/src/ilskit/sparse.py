"""CSR sparse matrices and the Gram-difference kernel.

A thin immutable wrapper over scipy's CSR storage.  Construction always
canonicalizes: duplicate triplets are summed, explicit zeros pruned, and
column indices sorted within each row.
"""

import numpy as np
import scipy.sparse

__all__ = ["SparseMatrix", "gram_diff"]


class SparseMatrix:
    """Real CSR matrix.  Treat instances as immutable."""

    def __init__(self, mat):
        csr = scipy.sparse.csr_matrix(mat, dtype=float, copy=True)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if csr.nnz and not np.isfinite(csr.data).all():
            raise ValueError("matrix entries must be finite")
        self._csr = csr
        self._csr_t = None

    # -- constructors -------------------------------------------------

    @classmethod
    def from_triplets(cls, nrows, ncols, rows, cols, values):
        """Build from (row, col, value) triplets; duplicates are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if not (rows.shape == cols.shape == values.shape):
            raise ValueError("rows, cols, values must have matching lengths")
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if rows.size:
            if rows.min() < 0 or rows.max() >= nrows:
                raise ValueError("row index out of range")
            if cols.min() < 0 or cols.max() >= ncols:
                raise ValueError("column index out of range")
        coo = scipy.sparse.coo_matrix((values, (rows, cols)), shape=(nrows, ncols))
        return cls(coo)

    @classmethod
    def from_dense(cls, arr):
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"expected 2-D array, got shape {arr.shape}")
        return cls(scipy.sparse.csr_matrix(arr))

    @classmethod
    def eye(cls, nrows, ncols=None, scale=1.0):
        """scale times the rectangular identity (ones at (i, i))."""
        if ncols is None:
            ncols = nrows
        k = min(nrows, ncols)
        idx = np.arange(k)
        return cls.from_triplets(nrows, ncols, idx, idx, np.full(k, float(scale)))

    # -- structure ----------------------------------------------------

    @property
    def nrows(self):
        return self._csr.shape[0]

    @property
    def ncols(self):
        return self._csr.shape[1]

    @property
    def shape(self):
        return self._csr.shape

    @property
    def nnz(self):
        return self._csr.nnz

    @property
    def row_ptr(self):
        return self._csr.indptr

    @property
    def col_idx(self):
        return self._csr.indices

    @property
    def values(self):
        return self._csr.data

    def scipy(self):
        """Underlying scipy CSR matrix (do not mutate)."""
        return self._csr

    def to_dense(self):
        return self._csr.toarray()

    # -- products -----------------------------------------------------

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ncols,):
            raise ValueError(f"matvec expects shape ({self.ncols},), got {x.shape}")
        return self._csr @ x

    def rmatvec(self, y):
        """Transpose product A^T y."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.nrows,):
            raise ValueError(f"rmatvec expects shape ({self.nrows},), got {y.shape}")
        if self._csr_t is None:
            self._csr_t = self._csr.T.tocsr()
        return self._csr_t @ y

    def transpose(self):
        return SparseMatrix(self._csr.T)

    def __matmul__(self, x):
        return self.matvec(x)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def gram_diff(A1, A2):
    """Dense symmetric S = A1^T A1 - A2^T A2.

    The result is symmetrized exactly so downstream factorizations see a
    bitwise symmetric matrix.
    """
    if A1.ncols != A2.ncols:
        raise ValueError(f"column counts differ: {A1.ncols} vs {A2.ncols}")
    g1 = (A1.scipy().T @ A1.scipy()).toarray()
    g2 = (A2.scipy().T @ A2.scipy()).toarray()
    S = g1 - g2
    return (S + S.T) / 2.0
