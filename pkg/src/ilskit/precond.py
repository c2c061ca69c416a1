"""Block preconditioners for the 3x3 systems.

Every preconditioner applies its inverse to a flat block vector through
triangular block elimination; the only inner solves are Cholesky solves
with either the Gram block A1^T A1 (the bs* and but family, bound to the
``gram`` system) or the shifted matrix S - alpha*I (the parameterized
full-structure preconditioner ``palpha``, bound to the ``residual``
system).  Applying ``palpha`` costs exactly one Cholesky solve of size n
plus one product with each of A1, A2, A1^T, A2^T.

alpha = 0 is allowed for ``palpha``: it reproduces the system operator
exactly, which is handy as a test limit (GMRES then converges in one
iteration).
"""

import enum

import numpy as np

from .dense import cholesky
from .problem import SystemKind

__all__ = ["Method", "Preconditioner", "setup", "system_for_method", "METHODS"]


class Method(str, enum.Enum):
    NONE = "none"
    BS1 = "bs1"
    BS2 = "bs2"
    BS3 = "bs3"
    BUT = "but"
    PALPHA = "palpha"


METHODS = tuple(Method)

_GRAM_FAMILY = {Method.BS1, Method.BS2, Method.BS3, Method.BUT}


def system_for_method(method, requested=None):
    """System kind a method is bound to; validates an explicit request."""
    method = Method(method)
    if method is Method.PALPHA:
        bound = SystemKind.RESIDUAL
    elif method in _GRAM_FAMILY:
        bound = SystemKind.GRAM
    else:
        bound = None  # unpreconditioned: either system
    if requested is None:
        return bound if bound is not None else SystemKind.GRAM
    requested = SystemKind(requested)
    if bound is not None and requested is not bound:
        raise ValueError(f"method {method.value} is bound to the {bound.value} system")
    return requested


class Preconditioner:
    """Base: identity (the unpreconditioned baseline)."""

    method = Method.NONE

    def __init__(self, prob, kind):
        self.kind = SystemKind(kind)
        self.p = prob.p
        self.n = prob.n
        self.q = prob.q
        self.A1 = prob.A1
        self.A2 = prob.A2

    def _split(self, r):
        r = np.asarray(r, dtype=float)
        if r.shape != (self.p + self.n + self.q,):
            raise ValueError(
                f"expected vector of length {self.p + self.n + self.q}, got {r.shape}"
            )
        return r[: self.p], r[self.p : self.p + self.n], r[self.p + self.n :]

    def apply(self, r):
        """Solve P z = r."""
        return np.asarray(r, dtype=float).copy()

    def dense(self):
        """Dense P, for small-instance oracles and spectrum dumps."""
        return np.eye(self.p + self.n + self.q)

    def _dense_blocks(self, center, upper_a1, upper_a2t, lower_a1t):
        p, n, q = self.p, self.n, self.q
        P = np.zeros((p + n + q, p + n + q))
        P[:p, :p] = np.eye(p)
        P[p + n :, p + n :] = np.eye(q)
        P[p : p + n, p : p + n] = center
        a1 = self.A1.to_dense()
        a2 = self.A2.to_dense()
        if upper_a1:
            P[:p, p : p + n] = a1
        if upper_a2t:
            P[p : p + n, p + n :] = a2.T
        if lower_a1t:
            P[p : p + n, :p] = a1.T
        return P


class _GramBased(Preconditioner):
    """Shared setup for the preconditioners built around A1^T A1."""

    def __init__(self, prob, kind):
        super().__init__(prob, kind)
        self.gram_factor = prob.gram1_factor


class Bs1(_GramBased):
    method = Method.BS1

    def apply(self, r):
        r1, r2, r3 = self._split(r)
        return np.concatenate([r1, self.gram_factor.solve(r2), r3])

    def dense(self):
        return self._dense_blocks(
            (self.A1.to_dense().T @ self.A1.to_dense()), False, False, False
        )


class Bs2(_GramBased):
    method = Method.BS2

    def apply(self, r):
        r1, r2, r3 = self._split(r)
        z3 = r3
        z2 = self.gram_factor.solve(r2 - self.A2.rmatvec(z3))
        return np.concatenate([r1, z2, z3])

    def dense(self):
        return self._dense_blocks(
            (self.A1.to_dense().T @ self.A1.to_dense()), False, True, False
        )


class Bs3(_GramBased):
    method = Method.BS3

    def apply(self, r):
        r1, r2, r3 = self._split(r)
        z2 = self.gram_factor.solve(r2)
        z1 = r1 - self.A1.matvec(z2)
        return np.concatenate([z1, z2, r3])

    def dense(self):
        return self._dense_blocks(
            (self.A1.to_dense().T @ self.A1.to_dense()), True, False, False
        )


class But(_GramBased):
    method = Method.BUT

    def apply(self, r):
        r1, r2, r3 = self._split(r)
        z3 = r3
        z2 = self.gram_factor.solve(r2 - self.A2.rmatvec(z3))
        z1 = r1 - self.A1.matvec(z2)
        return np.concatenate([z1, z2, z3])

    def dense(self):
        return self._dense_blocks(
            (self.A1.to_dense().T @ self.A1.to_dense()), True, True, False
        )


class Palpha(Preconditioner):
    """Full-structure preconditioner with central block alpha * I.

    Applying the inverse reduces to one solve with S - alpha*I:

        (S - alpha I) z2 = A1^T r1 - A2^T r3 - r2
        z1 = r1 - A1 z2
        z3 = r3 - A2 z2
    """

    method = Method.PALPHA

    def __init__(self, prob, kind, alpha):
        super().__init__(prob, kind)
        if alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {alpha}")
        self.alpha = float(alpha)
        shifted = prob.S - self.alpha * np.eye(prob.n)
        self.shift_factor = cholesky(shifted)

    def apply(self, r):
        r1, r2, r3 = self._split(r)
        rhs = self.A1.rmatvec(r1) - self.A2.rmatvec(r3) - r2
        z2 = self.shift_factor.solve(rhs)
        z1 = r1 - self.A1.matvec(z2)
        z3 = r3 - self.A2.matvec(z2)
        return np.concatenate([z1, z2, z3])

    def dense(self):
        p, n, q = self.p, self.n, self.q
        a1 = self.A1.to_dense()
        a2 = self.A2.to_dense()
        P = np.zeros((p + n + q, p + n + q))
        P[:p, :p] = np.eye(p)
        P[:p, p : p + n] = a1
        P[p : p + n, :p] = a1.T
        P[p : p + n, p : p + n] = self.alpha * np.eye(n)
        P[p : p + n, p + n :] = -a2.T
        P[p + n :, p : p + n] = a2
        P[p + n :, p + n :] = np.eye(q)
        return P


def setup(prob, method, kind=None, alpha=None):
    """Build the preconditioner for a method, checking system compatibility.

    For ``palpha``, S - alpha*I must be SPD, which holds for any
    0 <= alpha < lambda_min(S); a NotSpdError from the factorization
    propagates otherwise.
    """
    method = Method(method)
    kind = system_for_method(method, kind)
    if method is Method.PALPHA:
        if alpha is None:
            raise ValueError("palpha requires alpha")
        return Palpha(prob, kind, alpha)
    if method is Method.NONE:
        return Preconditioner(prob, kind)
    cls = {Method.BS1: Bs1, Method.BS2: Bs2, Method.BS3: Bs3, Method.BUT: But}[method]
    return cls(prob, kind)
