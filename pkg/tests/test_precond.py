"""Preconditioner applies checked against independently built dense blocks."""

import numpy as np
import pytest

from ilskit.errors import NotSpdError
from ilskit.precond import METHODS, Method, setup, system_for_method
from ilskit.problem import IlsProblem, SystemKind, assemble
from ilskit.sparse import SparseMatrix

from conftest import controlled_instance


def hand_dense(method, prob, alpha=None):
    """Build the dense preconditioner directly from its block layout."""
    p, n, q = prob.p, prob.n, prob.q
    a1 = prob.A1.to_dense()
    a2 = prob.A2.to_dense()
    P = np.zeros((p + n + q, p + n + q))
    P[:p, :p] = np.eye(p)
    P[p + n :, p + n :] = np.eye(q)
    if method is Method.NONE:
        P[p : p + n, p : p + n] = np.eye(n)
        return P
    if method is Method.PALPHA:
        P[:p, p : p + n] = a1
        P[p : p + n, :p] = a1.T
        P[p : p + n, p : p + n] = alpha * np.eye(n)
        P[p : p + n, p + n :] = -a2.T
        P[p + n :, p : p + n] = a2
        return P
    P[p : p + n, p : p + n] = a1.T @ a1
    if method in (Method.BS3, Method.BUT):
        P[:p, p : p + n] = a1
    if method in (Method.BS2, Method.BUT):
        P[p : p + n, p + n :] = a2.T
    return P


def tiny_problem():
    """1x1 blocks: A1 = [[2]], A2 = [[1]], so G = 4 and S = 3."""
    a1 = SparseMatrix.from_dense(np.array([[2.0]]))
    a2 = SparseMatrix.from_dense(np.array([[1.0]]))
    return IlsProblem(a1, a2, np.array([1.0]), np.array([1.0]))


@pytest.fixture(scope="module")
def small():
    prob, lam = controlled_instance(seed=7, p=11, q=4, n=6)
    return prob, lam


@pytest.mark.parametrize("method", list(METHODS))
def test_apply_matches_dense_inverse(small, method):
    prob, lam = small
    alpha = 0.05 * lam[0] if method is Method.PALPHA else None
    pc = setup(prob, method, alpha=alpha)
    P = hand_dense(method, prob, alpha=alpha)
    rng = np.random.default_rng(41)
    dim = prob.p + prob.n + prob.q
    for _ in range(50):
        r = rng.standard_normal(dim)
        np.testing.assert_allclose(
            pc.apply(r), np.linalg.solve(P, r), rtol=1e-10, atol=1e-12
        )


@pytest.mark.parametrize("method", list(METHODS))
def test_dense_matches_hand_layout(small, method):
    prob, lam = small
    alpha = 0.05 * lam[0] if method is Method.PALPHA else None
    pc = setup(prob, method, alpha=alpha)
    np.testing.assert_allclose(pc.dense(), hand_dense(method, prob, alpha=alpha))


def test_none_apply_copies(small):
    prob, _ = small
    pc = setup(prob, Method.NONE)
    r = np.arange(float(prob.p + prob.n + prob.q))
    z = pc.apply(r)
    np.testing.assert_array_equal(z, r)
    assert z is not r
    z[0] = -99.0
    assert r[0] == 0.0


def test_palpha_differs_from_operator_by_center_shift(small):
    """P  - A is alpha * I in the central nxn block and zero elsewhere."""
    prob, lam = small
    alpha = 0.25 * lam[0]
    pc = setup(prob, Method.PALPHA, alpha=alpha)
    sys = assemble(prob, SystemKind.RESIDUAL)
    diff = pc.dense() - sys.operator.to_dense()
    expected = np.zeros_like(diff)
    sl = slice(prob.p, prob.p + prob.n)
    expected[sl, sl] = alpha * np.eye(prob.n)
    np.testing.assert_allclose(diff, expected, atol=1e-14)


def test_palpha_alpha_zero_equals_operator(small):
    prob, _ = small
    pc = setup(prob, Method.PALPHA, alpha=0.0)
    sys = assemble(prob, SystemKind.RESIDUAL)
    np.testing.assert_allclose(pc.dense(), sys.operator.to_dense(), atol=1e-14)


@pytest.mark.parametrize(
    "method,bound",
    [
        (Method.PALPHA, SystemKind.RESIDUAL),
        (Method.BS1, SystemKind.GRAM),
        (Method.BS2, SystemKind.GRAM),
        (Method.BS3, SystemKind.GRAM),
        (Method.BUT, SystemKind.GRAM),
    ],
)
def test_system_binding(method, bound):
    assert system_for_method(method) is bound
    assert system_for_method(method, bound) is bound
    other = (
        SystemKind.GRAM if bound is SystemKind.RESIDUAL else SystemKind.RESIDUAL
    )
    with pytest.raises(ValueError, match="bound to"):
        system_for_method(method, other)


def test_none_accepts_either_system():
    assert system_for_method(Method.NONE) is SystemKind.GRAM
    assert system_for_method(Method.NONE, SystemKind.RESIDUAL) is SystemKind.RESIDUAL
    assert system_for_method(Method.NONE, SystemKind.GRAM) is SystemKind.GRAM
    assert system_for_method("bs2") is SystemKind.GRAM


def test_setup_requires_alpha_for_palpha(small):
    prob, _ = small
    with pytest.raises(ValueError, match="requires alpha"):
        setup(prob, Method.PALPHA)


def test_palpha_negative_alpha_rejected(small):
    prob, _ = small
    with pytest.raises(ValueError, match="nonnegative"):
        setup(prob, Method.PALPHA, alpha=-1e-8)


def test_palpha_shift_not_spd(small):
    prob, lam = small
    with pytest.raises(NotSpdError):
        setup(prob, Method.PALPHA, alpha=1.5 * lam[0])


def test_apply_rejects_wrong_length(small):
    prob, _ = small
    pc = setup(prob, Method.BS2)
    with pytest.raises(ValueError, match="expected vector of length"):
        pc.apply(np.zeros(prob.p + prob.n + prob.q + 1))


class _CountingMat:
    def __init__(self, inner):
        self.inner = inner
        self.matvecs = 0
        self.rmatvecs = 0

    def matvec(self, x):
        self.matvecs += 1
        return self.inner.matvec(x)

    def rmatvec(self, x):
        self.rmatvecs += 1
        return self.inner.rmatvec(x)


class _CountingFactor:
    def __init__(self, inner):
        self.inner = inner
        self.solves = 0

    def solve(self, rhs):
        self.solves += 1
        return self.inner.solve(rhs)


def _instrument(pc, factor_attr):
    pc.A1 = _CountingMat(pc.A1)
    pc.A2 = _CountingMat(pc.A2)
    factor = _CountingFactor(getattr(pc, factor_attr))
    setattr(pc, factor_attr, factor)
    return pc.A1, pc.A2, factor


def test_palpha_apply_cost(small):
    """One shifted solve plus one product with each of A1, A2, A1^T, A2^T."""
    prob, lam = small
    pc = setup(prob, Method.PALPHA, alpha=0.1 * lam[0])
    a1, a2, factor = _instrument(pc, "shift_factor")
    pc.apply(np.ones(prob.p + prob.n + prob.q))
    assert factor.solves == 1
    assert (a1.matvecs, a1.rmatvecs) == (1, 1)
    assert (a2.matvecs, a2.rmatvecs) == (1, 1)


@pytest.mark.parametrize(
    "method,a1_counts,a2_counts",
    [
        (Method.BS1, (0, 0), (0, 0)),
        (Method.BS2, (0, 0), (0, 1)),
        (Method.BS3, (1, 0), (0, 0)),
        (Method.BUT, (1, 0), (0, 1)),
    ],
)
def test_gram_family_apply_cost(small, method, a1_counts, a2_counts):
    prob, _ = small
    pc = setup(prob, method)
    a1, a2, factor = _instrument(pc, "gram_factor")
    pc.apply(np.ones(prob.p + prob.n + prob.q))
    assert factor.solves == 1
    assert (a1.matvecs, a1.rmatvecs) == a1_counts
    assert (a2.matvecs, a2.rmatvecs) == a2_counts


@pytest.mark.parametrize(
    "method,expected",
    [
        (Method.BS1, (5.0, 2.0, 3.0)),
        (Method.BS2, (5.0, 1.25, 3.0)),
        (Method.BS3, (1.0, 2.0, 3.0)),
        (Method.BUT, (2.5, 1.25, 3.0)),
    ],
)
def test_gram_family_hand_values(method, expected):
    """With A1 = [[2]], A2 = [[1]] (G = 4), apply to r = (5, 8, 3)."""
    prob = tiny_problem()
    pc = setup(prob, method)
    np.testing.assert_allclose(pc.apply(np.array([5.0, 8.0, 3.0])), expected)


def test_palpha_hand_values():
    """S = 3, alpha = 1: rhs = 2*5 - 1*3 - 8 = -1, z2 = -1/2."""
    prob = tiny_problem()
    pc = setup(prob, Method.PALPHA, alpha=1.0)
    np.testing.assert_allclose(
        pc.apply(np.array([5.0, 8.0, 3.0])), [6.0, -0.5, 3.5]
    )


def test_method_enum_roundtrip():
    assert [m.value for m in METHODS] == ["none", "bs1", "bs2", "bs3", "but", "palpha"]
    assert Method("palpha") is Method.PALPHA
