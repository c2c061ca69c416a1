"""Indefinite least squares problems and their block 3x3 reformulations.

The problem min_x (b - A x)^T J (b - A x) with J = diag(I_p, -I_q) and
A = [A1; A2] has the unique solution of the normal equation

    S x = A1^T b1 - A2^T b2,      S = A1^T A1 - A2^T A2,

provided S is symmetric positive definite.  Instead of forming S, the
solvers work on an equivalent square block 3x3 system in the unknowns
(delta1, x, delta2) where delta1 = b1 - A1 x and delta2 = A2 x - b2.
Two variants are assembled here:

* ``residual`` keeps the zero central block and couples the residuals
  through A1^T and -A2^T (unsymmetric, indefinite);
* ``gram`` eliminates delta1 from the middle row, leaving the Gram block
  A1^T A1 at the center.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .dense import cholesky, householder_qr_orthogonal, smallest_singular_value, sym_eigen
from .errors import GenerationError, NotSpdError, ProblemValidationError, RankDeficientError
from .sparse import SparseMatrix, gram_diff


class SystemKind(str, enum.Enum):
    RESIDUAL = "residual"
    GRAM = "gram"


@dataclass
class BlockVector:
    """Flat vector over the block layout (delta1; x; delta2)."""

    data: np.ndarray
    p: int
    n: int
    q: int

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != (self.p + self.n + self.q,):
            raise ValueError(
                f"data has shape {self.data.shape}, expected ({self.p + self.n + self.q},)"
            )

    @classmethod
    def from_parts(cls, d1, x, d2):
        d1 = np.asarray(d1, dtype=float)
        x = np.asarray(x, dtype=float)
        d2 = np.asarray(d2, dtype=float)
        return cls(np.concatenate([d1, x, d2]), d1.size, x.size, d2.size)

    @property
    def d1(self):
        return self.data[: self.p]

    @property
    def x(self):
        return self.data[self.p : self.p + self.n]

    @property
    def d2(self):
        return self.data[self.p + self.n :]

    def copy(self):
        return BlockVector(self.data.copy(), self.p, self.n, self.q)


class IlsProblem:
    """Validated ILS instance.

    Construction checks shapes, finiteness, and that S = A1^T A1 - A2^T A2
    is SPD (via Cholesky); failure raises ProblemValidationError.  A full
    column rank failure of A1 surfaces the same way, since it makes S
    singular at best.
    """

    def __init__(self, A1, A2, b1, b2):
        if not isinstance(A1, SparseMatrix) or not isinstance(A2, SparseMatrix):
            raise ProblemValidationError("A1 and A2 must be SparseMatrix instances")
        b1 = np.asarray(b1, dtype=float)
        b2 = np.asarray(b2, dtype=float)
        if A1.nrows < 1 or A1.ncols < 1:
            raise ProblemValidationError("A1 must have at least one row and column")
        if A2.ncols != A1.ncols:
            raise ProblemValidationError(
                f"A2 has {A2.ncols} columns, expected {A1.ncols}"
            )
        if b1.shape != (A1.nrows,):
            raise ProblemValidationError(f"b1 has shape {b1.shape}, expected ({A1.nrows},)")
        if b2.shape != (A2.nrows,):
            raise ProblemValidationError(f"b2 has shape {b2.shape}, expected ({A2.nrows},)")
        if not (np.isfinite(b1).all() and np.isfinite(b2).all()):
            raise ProblemValidationError("right-hand sides must be finite")
        self.A1 = A1
        self.A2 = A2
        self.b1 = b1
        self.b2 = b2
        self.S = gram_diff(A1, A2)
        try:
            self._s_factor = cholesky(self.S)
        except NotSpdError as exc:
            raise ProblemValidationError(
                f"S = A1^T A1 - A2^T A2 is not positive definite: {exc}"
            ) from exc
        self._gram1_factor = None

    @property
    def p(self):
        return self.A1.nrows

    @property
    def n(self):
        return self.A1.ncols

    @property
    def q(self):
        return self.A2.nrows

    @property
    def dim(self):
        """Total dimension of the block systems."""
        return self.p + self.n + self.q

    @property
    def s_factor(self):
        return self._s_factor

    @property
    def gram1_factor(self):
        """Cholesky factor of A1^T A1, computed on first use."""
        if self._gram1_factor is None:
            g = (self.A1.scipy().T @ self.A1.scipy()).toarray()
            self._gram1_factor = cholesky((g + g.T) / 2.0)
        return self._gram1_factor

    @property
    def normal_rhs(self):
        return self.A1.rmatvec(self.b1) - self.A2.rmatvec(self.b2)

    def direct_oracle(self):
        """Reference solution of the normal equation via Cholesky.

        One step of iterative refinement keeps the residual at roundoff
        even for badly scaled instances.
        """
        rhs = self.normal_rhs
        x = self._s_factor.solve(rhs)
        x += self._s_factor.solve(rhs - self.S @ x)
        return x

    def initial_guess(self):
        """x = 0 with consistent residual blocks: u0 = (b1; 0; b2)."""
        return BlockVector.from_parts(self.b1, np.zeros(self.n), self.b2)


@dataclass
class BlockSystem:
    kind: SystemKind
    operator: SparseMatrix
    rhs: BlockVector

    @property
    def dim(self):
        return self.operator.nrows


def assemble(prob, kind):
    """Assemble the block 3x3 operator and right-hand side for one variant."""
    kind = SystemKind(kind)
    a1 = prob.A1.scipy()
    a2 = prob.A2.scipy()
    eye_p = scipy.sparse.identity(prob.p, format="csr")
    eye_q = scipy.sparse.identity(prob.q, format="csr")
    if kind is SystemKind.RESIDUAL:
        op = scipy.sparse.bmat(
            [
                [eye_p, a1, None],
                [a1.T, None, -a2.T],
                [None, a2, eye_q],
            ],
            format="csr",
        )
        rhs = BlockVector.from_parts(prob.b1, np.zeros(prob.n), prob.b2)
    else:
        gram1 = a1.T @ a1
        op = scipy.sparse.bmat(
            [
                [eye_p, a1, None],
                [None, gram1, a2.T],
                [None, a2, eye_q],
            ],
            format="csr",
        )
        rhs = BlockVector.from_parts(prob.b1, prob.A1.rmatvec(prob.b1), prob.b2)
    return BlockSystem(kind, SparseMatrix(op), rhs)


@dataclass
class Metrics:
    res: float
    res_normal: float
    err: float | None = None


def residual_metrics(prob, system, u, xref=None):
    """Relative block-system residual, normal-equation residual, and error."""
    b = system.rhs.data
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise ValueError("right-hand side has zero norm")
    res = float(np.linalg.norm(b - system.operator.matvec(u.data)) / bnorm)
    ne_rhs = prob.normal_rhs
    ne_norm = np.linalg.norm(ne_rhs)
    if ne_norm == 0.0:
        raise ValueError("normal-equation right-hand side has zero norm")
    res_normal = float(np.linalg.norm(ne_rhs - prob.S @ u.x) / ne_norm)
    err = None
    if xref is not None:
        xref = np.asarray(xref, dtype=float)
        xnorm = np.linalg.norm(xref)
        if xnorm == 0.0:
            raise ValueError("reference solution has zero norm")
        err = float(np.linalg.norm(u.x - xref) / xnorm)
    return Metrics(res=res, res_normal=res_normal, err=err)


@dataclass
class ValidationReport:
    spd: bool
    p: int
    q: int
    n: int
    lambda_min: float | None = None
    alpha_max: float | None = None
    detail: str = ""


def validate_parts(A1, A2):
    """Structural report for raw matrix parts, without constructing a problem.

    Never raises for indefinite S; the flags carry the verdict.  lambda_min
    comes from the full symmetric eigensolve, and alpha_max = lambda_min / 2
    is the upper bound for the convergent splitting iteration.
    """
    if A1.ncols != A2.ncols:
        raise ValueError(f"column counts differ: {A1.ncols} vs {A2.ncols}")
    S = gram_diff(A1, A2)
    lam_min = float(sym_eigen(S).values[0]) if S.shape[0] else 0.0
    try:
        cholesky(S)
        spd = True
        detail = ""
    except NotSpdError as exc:
        spd = False
        detail = str(exc)
    return ValidationReport(
        spd=spd,
        p=A1.nrows,
        q=A2.nrows,
        n=A1.ncols,
        lambda_min=lam_min,
        alpha_max=lam_min / 2.0 if spd else None,
        detail=detail,
    )


def validate(prob):
    return validate_parts(prob.A1, prob.A2)


# ----------------------------------------------------------------------
# generators


def default_q(p):
    """Row count for the indefinite block when none is given."""
    return math.ceil(p / 4)


def problem_from_matrix(A1, q=None, seed=0, a2_scale=0.3):
    """ILS instance from a given A1: A2 = a2_scale * eye(q, n), random b.

    b1 and b2 are uniform(0, 1) draws from a seeded PCG64 generator, so
    the instance is reproducible from (matrix, q, seed).
    """
    if q is None:
        q = default_q(A1.nrows)
    if q < 0:
        raise ProblemValidationError(f"q must be nonnegative, got {q}")
    rng = np.random.default_rng(seed)
    A2 = SparseMatrix.eye(q, A1.ncols, scale=a2_scale)
    b1 = rng.random(A1.nrows)
    b2 = rng.random(q)
    return IlsProblem(A1, A2, b1, b2)


@dataclass
class TlsInstance:
    problem: IlsProblem
    x_tls: np.ndarray
    sigma: float


def _random_orthogonal(rng, k, attempts=5):
    for _ in range(attempts):
        try:
            return householder_qr_orthogonal(rng.standard_normal((k, k)))
        except RankDeficientError:
            continue
    raise GenerationError(f"could not draw a full-rank {k}x{k} Gaussian matrix")


def tls_problem(p, q, n, eps=1e-4, seed=0):
    """ILS instance derived from a noisy total least squares problem.

    A clean matrix Bt = Y [D; 0] Z^T with D = diag(1, 1/2, ..., 1/n) and
    random orthogonal Y, Z gets Gaussian noise: B = Bt + eps*E, and the
    right-hand side d = Bt 1 + eps*f.  With sigma the smallest singular
    value of (B, d), the ILS instance is A1 = B, A2 = sigma * eye(q, n),
    b1 = d, b2 = 0.  When q >= n this reproduces the TLS solution
    x_tls = (B^T B - sigma^2 I)^{-1} B^T d, which is returned (computed by
    an independent dense solve) for cross-checking.
    """
    if not (1 <= n <= p):
        raise GenerationError(f"need 1 <= n <= p, got p={p}, n={n}")
    if q < 0:
        raise GenerationError(f"q must be nonnegative, got {q}")
    rng = np.random.default_rng(seed)
    Y = _random_orthogonal(rng, p)
    Z = _random_orthogonal(rng, n)
    D = 1.0 / np.arange(1, n + 1)
    Bt = Y[:, :n] @ (D[:, None] * Z.T)
    E = rng.standard_normal((p, n))
    f = rng.standard_normal(p)
    B = Bt + eps * E
    d = Bt @ np.ones(n) + eps * f
    sigma = smallest_singular_value(np.hstack([B, d[:, None]]))
    gram = B.T @ B
    shifted = (gram + gram.T) / 2.0 - sigma**2 * np.eye(n)
    try:
        cholesky(shifted)
    except NotSpdError as exc:
        raise GenerationError(
            f"B^T B - sigma^2 I is not positive definite (sigma={sigma:.3e}): {exc}"
        ) from exc
    x_tls = np.linalg.solve(shifted, B.T @ d)
    prob = IlsProblem(
        SparseMatrix.from_dense(B),
        SparseMatrix.eye(q, n, scale=sigma),
        d,
        np.zeros(q),
    )
    return TlsInstance(problem=prob, x_tls=x_tls, sigma=sigma)
