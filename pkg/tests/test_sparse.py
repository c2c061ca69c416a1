import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ilskit import SparseMatrix, gram_diff


def test_from_triplets_known_csr_layout():
    # [[1, 0, 2], [0, 3, 0]] written with shuffled triplets
    m = SparseMatrix.from_triplets(2, 3, [1, 0, 0], [1, 2, 0], [3.0, 2.0, 1.0])
    assert m.shape == (2, 3)
    assert m.nnz == 3
    np.testing.assert_array_equal(m.row_ptr, [0, 2, 3])
    np.testing.assert_array_equal(m.col_idx, [0, 2, 1])
    np.testing.assert_array_equal(m.values, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(m.to_dense(), [[1.0, 0.0, 2.0], [0.0, 3.0, 0.0]])


def test_duplicates_sum_and_zeros_drop():
    m = SparseMatrix.from_triplets(
        2, 2, [0, 0, 1, 1], [0, 0, 1, 1], [1.5, 2.5, 3.0, -3.0]
    )
    assert m.nnz == 1
    np.testing.assert_array_equal(m.to_dense(), [[4.0, 0.0], [0.0, 0.0]])


def test_triplet_validation():
    with pytest.raises(ValueError, match="row index"):
        SparseMatrix.from_triplets(2, 2, [2], [0], [1.0])
    with pytest.raises(ValueError, match="column index"):
        SparseMatrix.from_triplets(2, 2, [0], [-1], [1.0])
    with pytest.raises(ValueError, match="matching lengths"):
        SparseMatrix.from_triplets(2, 2, [0, 1], [0], [1.0])
    with pytest.raises(ValueError, match="finite"):
        SparseMatrix.from_triplets(2, 2, [0], [0], [np.nan])


def test_eye_rectangular():
    m = SparseMatrix.eye(2, 5, scale=0.3)
    expect = np.zeros((2, 5))
    expect[0, 0] = expect[1, 1] = 0.3
    np.testing.assert_array_equal(m.to_dense(), expect)
    assert SparseMatrix.eye(3).nnz == 3
    assert SparseMatrix.eye(0, 4).nnz == 0


def test_matvec_shape_checks():
    m = SparseMatrix.eye(2, 3)
    with pytest.raises(ValueError, match="matvec expects"):
        m.matvec(np.ones(2))
    with pytest.raises(ValueError, match="rmatvec expects"):
        m.rmatvec(np.ones(3))


@st.composite
def triplet_matrices(draw):
    nrows = draw(st.integers(1, 6))
    ncols = draw(st.integers(1, 6))
    count = draw(st.integers(0, 12))
    rows = draw(st.lists(st.integers(0, nrows - 1), min_size=count, max_size=count))
    cols = draw(st.lists(st.integers(0, ncols - 1), min_size=count, max_size=count))
    vals = draw(
        st.lists(
            st.floats(-10, 10, allow_nan=False, allow_infinity=False),
            min_size=count,
            max_size=count,
        )
    )
    return nrows, ncols, rows, cols, vals


@settings(max_examples=60, deadline=None)
@given(triplet_matrices(), st.integers(0, 2**32 - 1))
def test_products_match_dense(spec, vec_seed):
    nrows, ncols, rows, cols, vals = spec
    m = SparseMatrix.from_triplets(nrows, ncols, rows, cols, vals)
    dense = np.zeros((nrows, ncols))
    for i, j, v in zip(rows, cols, vals):
        dense[i, j] += v
    rng = np.random.default_rng(vec_seed)
    x = rng.standard_normal(ncols)
    y = rng.standard_normal(nrows)
    np.testing.assert_allclose(m.matvec(x), dense @ x, atol=1e-12)
    np.testing.assert_allclose(m.rmatvec(y), dense.T @ y, atol=1e-12)
    np.testing.assert_allclose(m @ x, dense @ x, atol=1e-12)
    np.testing.assert_array_equal(m.transpose().to_dense(), m.to_dense().T)


def test_gram_diff_matches_dense_and_is_exactly_symmetric():
    rng = np.random.default_rng(7)
    A1 = SparseMatrix.from_dense(rng.standard_normal((9, 4)))
    A2 = SparseMatrix.from_dense(rng.standard_normal((3, 4)))
    S = gram_diff(A1, A2)
    expect = A1.to_dense().T @ A1.to_dense() - A2.to_dense().T @ A2.to_dense()
    np.testing.assert_allclose(S, expect, atol=1e-12)
    np.testing.assert_array_equal(S, S.T)


def test_gram_diff_column_mismatch():
    with pytest.raises(ValueError, match="column counts differ"):
        gram_diff(SparseMatrix.eye(3, 3), SparseMatrix.eye(2, 4))


def test_from_dense_rejects_non_2d():
    with pytest.raises(ValueError, match="2-D"):
        SparseMatrix.from_dense(np.ones(3))
