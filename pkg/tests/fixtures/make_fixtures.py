"""Regenerate the vendored Matrix Market fixtures.

The benchmark suite references two matrices from the Matrix Market
collection, TOLS340 (340x340, nnz 2196) and WELL1033 (1033x320, nnz 4732).
This sandbox has no network access, so the files shipped here are
deterministic synthetic stand-ins with the same shapes and entry counts.
They are built to be strongly diagonally dominant so that A1 has a
comfortably bounded smallest singular value and the benchmark problems
(A2 = 0.3*eye, q = ceil(p/4)) are well posed.

Run from the repository root:

    python3 tests/fixtures/make_fixtures.py

Output is byte-stable: the files are generated from fixed seeds and
committed; re-running must be a no-op diff.
"""

import os

import numpy as np

from ilskit.mtxio import write_mtx
from ilskit.sparse import SparseMatrix

HERE = os.path.dirname(os.path.abspath(__file__))


def _scatter_columns(rng, nrows, ncols, count_for_row, avoid_diag):
    """Pick distinct off-diagonal column indices for every row."""
    rows = []
    cols = []
    for i in range(nrows):
        k = count_for_row(i)
        if k == 0:
            continue
        forbidden = {i} if avoid_diag and i < ncols else set()
        picked = []
        while len(picked) < k:
            c = int(rng.integers(0, ncols))
            if c in forbidden:
                continue
            forbidden.add(c)
            picked.append(c)
        rows.extend([i] * k)
        cols.extend(picked)
    return np.array(rows, dtype=int), np.array(cols, dtype=int)


def _signed_values(rng, count, lo, hi):
    mag = rng.uniform(lo, hi, size=count)
    sign = rng.choice([-1.0, 1.0], size=count)
    return mag * sign


def make_tols340_standin():
    """340x340 square matrix, nnz = 2196 (340 diagonal + 1856 scattered)."""
    rng = np.random.default_rng(3401)
    n = 340
    # 156 rows carry 6 off-diagonal entries, the rest carry 5: 1856 total.
    rows, cols = _scatter_columns(
        rng, n, n, lambda i: 6 if i < 156 else 5, avoid_diag=True
    )
    vals = _signed_values(rng, rows.size, 0.10, 0.35)
    all_rows = np.concatenate([np.arange(n), rows])
    all_cols = np.concatenate([np.arange(n), cols])
    all_vals = np.concatenate([np.full(n, 4.0), vals])
    return SparseMatrix.from_triplets(n, n, all_rows, all_cols, all_vals)


def make_well1033_standin():
    """1033x320 tall matrix, nnz = 4732.

    Rows 0..319 carry a 3.0 "spine" entry on their own column plus two
    scattered entries; every later row carries five scattered entries and
    the first 207 of them carry a sixth.  Appending rows never lowers the
    smallest singular value, so the spine block alone keeps sigma_min(A1)
    near 3.
    """
    rng = np.random.default_rng(10331)
    p, n = 1033, 320

    def count_for_row(i):
        if i < n:
            return 2
        if i < n + 207:
            return 6
        return 5

    rows, cols = _scatter_columns(rng, p, n, count_for_row, avoid_diag=True)
    vals = _signed_values(rng, rows.size, 0.10, 0.50)
    spine = np.arange(n)
    all_rows = np.concatenate([spine, rows])
    all_cols = np.concatenate([spine, cols])
    all_vals = np.concatenate([np.full(n, 3.0), vals])
    return SparseMatrix.from_triplets(p, n, all_rows, all_cols, all_vals)


def main():
    tols = make_tols340_standin()
    assert tols.shape == (340, 340) and tols.nnz == 2196, tols.nnz
    write_mtx(
        os.path.join(HERE, "tols340_standin.mtx"),
        tols,
        comment=(
            "Deterministic synthetic stand-in for the Matrix Market TOLS340\n"
            "matrix (340x340, nnz 2196).  Generated offline by\n"
            "make_fixtures.py with seed 3401; not the original data."
        ),
    )

    well = make_well1033_standin()
    assert well.shape == (1033, 320) and well.nnz == 4732, well.nnz
    write_mtx(
        os.path.join(HERE, "well1033_standin.mtx"),
        well,
        comment=(
            "Deterministic synthetic stand-in for the Matrix Market WELL1033\n"
            "matrix (1033x320, nnz 4732).  Generated offline by\n"
            "make_fixtures.py with seed 10331; not the original data."
        ),
    )
    print("wrote", tols.shape, tols.nnz, "and", well.shape, well.nnz)


if __name__ == "__main__":
    main()
