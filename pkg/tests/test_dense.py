import numpy as np
import pytest

from ilskit import (
    EigenConvergenceError,
    NotSpdError,
    RankDeficientError,
    chol_solve,
    cholesky,
    householder_qr_orthogonal,
    smallest_singular_value,
    sym_eigen,
)
from ilskit.dense import PIVOT_RTOL


def spd(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def test_cholesky_reconstructs():
    M = spd(0, 12)
    f = cholesky(M)
    assert np.allclose(np.triu(f.lower, 1), 0.0)
    np.testing.assert_allclose(f.lower @ f.lower.T, M, atol=1e-10)


def test_chol_solve_matches_reference():
    M = spd(1, 9)
    rng = np.random.default_rng(2)
    b = rng.standard_normal(9)
    x = chol_solve(cholesky(M), b)
    np.testing.assert_allclose(x, np.linalg.solve(M, b), atol=1e-10)
    B = rng.standard_normal((9, 3))
    np.testing.assert_allclose(
        chol_solve(cholesky(M), B), np.linalg.solve(M, B), atol=1e-10
    )


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotSpdError):
        cholesky(np.diag([1.0, -1.0]))
    with pytest.raises(NotSpdError, match="no positive entry"):
        cholesky(np.diag([-2.0, -1.0]))


def test_cholesky_pivot_threshold():
    # pivots sit on diag(L)^2; the relative cutoff is PIVOT_RTOL * max diag
    assert cholesky(np.diag([1.0, 10 * PIVOT_RTOL])) is not None
    with pytest.raises(NotSpdError, match="pivot"):
        cholesky(np.diag([1.0, 0.5 * PIVOT_RTOL]))


def test_cholesky_rejects_asymmetric_and_nonsquare():
    with pytest.raises(ValueError, match="not symmetric"):
        cholesky(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="square"):
        cholesky(np.ones((2, 3)))


def test_cholesky_empty():
    f = cholesky(np.zeros((0, 0)))
    assert f.solve(np.zeros(0)).shape == (0,)


def test_qr_orthogonal_factor():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((8, 8))
    Q = householder_qr_orthogonal(G)
    np.testing.assert_allclose(Q.T @ Q, np.eye(8), atol=1e-12)
    R = Q.T @ G
    np.testing.assert_allclose(np.tril(R, -1), 0.0, atol=1e-12)


def test_qr_rank_deficient():
    with pytest.raises(RankDeficientError):
        householder_qr_orthogonal(np.zeros((3, 3)))
    G = np.ones((3, 3))  # rank one
    with pytest.raises(RankDeficientError):
        householder_qr_orthogonal(G)
    with pytest.raises(ValueError, match="square"):
        householder_qr_orthogonal(np.ones((2, 3)))


def test_sym_eigen_contract():
    M = spd(4, 10) - 11.0 * np.eye(10)  # make some eigenvalues negative
    eig = sym_eigen(M)
    assert np.all(np.diff(eig.values) >= 0)
    np.testing.assert_allclose(M @ eig.vectors, eig.vectors * eig.values, atol=1e-9)
    np.testing.assert_allclose(eig.vectors.T @ eig.vectors, np.eye(10), atol=1e-12)


def test_sym_eigen_known_values():
    eig = sym_eigen(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_allclose(eig.values, [-1.0, 2.0, 3.0])


def test_sym_eigen_failure_is_typed(monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(np.linalg, "eigh", boom)
    with pytest.raises(EigenConvergenceError):
        sym_eigen(np.eye(2))


def test_smallest_singular_value_known():
    assert smallest_singular_value(np.diag([3.0, 2.0, 1.0])) == pytest.approx(1.0)
    tall = np.vstack([np.diag([2.0, 5.0]), np.zeros((3, 2))])
    assert smallest_singular_value(tall) == pytest.approx(2.0)


def test_smallest_singular_value_vs_svd_oracle():
    rng = np.random.default_rng(5)
    for shape in [(7, 4), (4, 4), (12, 9)]:
        M = rng.standard_normal(shape)
        expect = np.linalg.svd(M, compute_uv=False).min()
        assert smallest_singular_value(M) == pytest.approx(expect, rel=1e-10)
