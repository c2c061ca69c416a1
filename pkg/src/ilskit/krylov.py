"""Iterative solvers: left-preconditioned GMRES and the splitting iteration.

GMRES runs Arnoldi with modified Gram-Schmidt and Givens rotations on the
left-preconditioned operator.  The rotation machinery tracks the
preconditioned residual norm, but convergence is only ever declared on
the true relative residual ||b - A u|| / ||b||, recomputed at every
iteration; the report carries that true-residual history.

The splitting iteration u_{k+1} = P^{-1}(Q u_k + b) uses the
parameterized full-structure preconditioner P with Q = diag(0, alpha*I, 0)
on the residual system.  It converges exactly when the spectral radius of
P^{-1} Q = max_i |alpha / (alpha - mu_i)| over the eigenvalues mu_i of S
is below one, i.e. for 0 < alpha < lambda_min(S) / 2.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dense import sym_eigen
from .errors import BreakdownError
from .precond import Method, setup
from .problem import BlockVector, SystemKind, assemble

BREAKDOWN_TOL = 1e-300


@dataclass
class SolverConfig:
    tol: float = 1e-8
    maxit: int = 1500
    restart: int | None = None

    def __post_init__(self):
        if not (0 < self.tol < 1):
            raise ValueError(f"tol must lie in (0, 1), got {self.tol}")
        if self.maxit < 1:
            raise ValueError(f"maxit must be positive, got {self.maxit}")
        if self.restart is not None and self.restart < 1:
            raise ValueError(f"restart must be positive, got {self.restart}")


@dataclass
class SolveReport:
    method: str
    converged: bool
    iters: int
    res_history: list = field(default_factory=list)
    precond_res_history: list = field(default_factory=list)
    final_res: float = np.inf
    wall_seconds: float = 0.0
    alpha: float | None = None
    final_err: float | None = None
    res_normal: float | None = None
    breakdown: bool = False
    alpha_bound: float | None = None
    within_bound: bool | None = None


class _Basis:
    """Row-chunked storage for the Arnoldi basis."""

    def __init__(self, dim, chunk=64):
        self.chunk = chunk
        self.rows = np.empty((chunk, dim))
        self.k = 0

    def append(self, v):
        if self.k == self.rows.shape[0]:
            self.rows = np.vstack([self.rows, np.empty((self.chunk, self.rows.shape[1]))])
        self.rows[self.k] = v
        self.k += 1

    def combine(self, y):
        return y @ self.rows[: y.size]

    def row(self, i):
        return self.rows[i]


def gmres(system, precond=None, cfg=None, u0=None, method_label=None):
    """Left-preconditioned GMRES on a block system.

    Returns (solution BlockVector, SolveReport).  ``u0`` defaults to zero;
    the ILS pipeline passes the block guess (b1; 0; b2).  With
    ``cfg.restart`` set, the Arnoldi space is rebuilt every ``restart``
    steps; ``iters`` always counts total inner steps and ``maxit`` caps
    that total.
    """
    cfg = cfg or SolverConfig()
    A = system.operator
    b = system.rhs.data
    dim = b.size
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise ValueError("right-hand side has zero norm")
    apply_m = precond.apply if precond is not None else (lambda r: r)
    label = method_label or (precond.method.value if precond is not None else "none")

    x = np.zeros(dim) if u0 is None else np.asarray(u0.data, dtype=float).copy()

    def true_res(vec):
        return float(np.linalg.norm(b - A.matvec(vec)) / bnorm)

    t0 = time.perf_counter()
    res_hist = [true_res(x)]
    pre_hist = []
    iters = 0
    converged = res_hist[0] <= cfg.tol
    breakdown = False

    while not converged and iters < cfg.maxit:
        r = b - A.matvec(x)
        z = apply_m(r)
        beta = float(np.linalg.norm(z))
        if not pre_hist:
            pre_hist.append(beta)
        if beta <= BREAKDOWN_TOL:
            # preconditioned residual vanished; the true residual decides
            converged = res_hist[-1] <= cfg.tol
            breakdown = not converged
            break

        basis = _Basis(dim)
        basis.append(z / beta)
        limit = cfg.restart if cfg.restart is not None else cfg.maxit
        cap = min(limit, cfg.maxit - iters)
        R = np.zeros((cap + 1, cap))
        g = np.zeros(cap + 1)
        g[0] = beta
        cs = np.zeros(cap)
        sn = np.zeros(cap)
        xc = x
        exhausted = False

        for j in range(cap):
            w = apply_m(A.matvec(basis.row(j)))
            h = np.zeros(j + 2)
            for i in range(j + 1):
                h[i] = float(basis.row(i) @ w)
                w -= h[i] * basis.row(i)
            wnorm = float(np.linalg.norm(w))
            h[j + 1] = wnorm
            for i in range(j):
                hi = cs[i] * h[i] + sn[i] * h[i + 1]
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1]
                h[i] = hi
            denom = float(np.hypot(h[j], h[j + 1]))
            if denom == 0.0:
                cs[j], sn[j] = 1.0, 0.0
            else:
                cs[j], sn[j] = h[j] / denom, h[j + 1] / denom
            h[j] = denom
            R[: j + 2, j] = h
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]

            iters += 1
            if denom == 0.0:
                y = np.zeros(j + 1)
                if j > 0:
                    y[:j] = scipy.linalg.solve_triangular(R[:j, :j], g[:j])
            else:
                y = scipy.linalg.solve_triangular(R[: j + 1, : j + 1], g[: j + 1])
            xc = x + basis.combine(y)
            res = true_res(xc)
            res_hist.append(res)
            pre_hist.append(abs(float(g[j + 1])))
            if res <= cfg.tol:
                converged = True
                break
            if wnorm <= BREAKDOWN_TOL:
                raise BreakdownError(
                    f"Arnoldi breakdown at iteration {iters} with residual {res:.3e} above tol"
                )
            if iters >= cfg.maxit:
                exhausted = True
                break
            basis.append(w / wnorm)

        x = xc
        if exhausted:
            break

    wall = time.perf_counter() - t0
    p, n, q = system.rhs.p, system.rhs.n, system.rhs.q
    report = SolveReport(
        method=label,
        converged=bool(converged),
        iters=iters,
        res_history=res_hist,
        precond_res_history=pre_hist,
        final_res=res_hist[-1],
        wall_seconds=wall,
        breakdown=breakdown,
    )
    return BlockVector(x, p, n, q), report


def splitting_spectral_radius(alpha, s_eigenvalues):
    """Spectral radius of P^{-1} Q from the spectrum of S.

    The nonzero eigenvalues are alpha / (alpha - mu_i); the rest vanish.
    When alpha hits an eigenvalue exactly the splitting is singular and
    the radius is reported as +inf.
    """
    if alpha == 0.0:
        return 0.0
    mus = np.asarray(s_eigenvalues, dtype=float)
    d = mus - alpha
    if np.any(d == 0.0):
        return float("inf")
    with np.errstate(over="ignore"):
        return float(np.max(np.abs(alpha / d)))


def stationary(prob, alpha, cfg=None):
    """Splitting iteration for the residual system; never raises on divergence.

    The report records whether alpha sat below the convergence bound
    lambda_min(S) / 2 alongside the usual residual history.
    """
    cfg = cfg or SolverConfig()
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    system = assemble(prob, SystemKind.RESIDUAL)
    pc = setup(prob, Method.PALPHA, kind=SystemKind.RESIDUAL, alpha=alpha)
    A = system.operator
    b = system.rhs.data
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise ValueError("right-hand side has zero norm")
    lam_min = float(sym_eigen(prob.S).values[0])
    bound = lam_min / 2.0

    t0 = time.perf_counter()
    u = prob.initial_guess().data.copy()
    sl = slice(prob.p, prob.p + prob.n)
    res_hist = [float(np.linalg.norm(b - A.matvec(u)) / bnorm)]
    iters = 0
    converged = res_hist[0] <= cfg.tol
    while not converged and iters < cfg.maxit:
        qu = b.copy()
        qu[sl] += alpha * u[sl]
        u = pc.apply(qu)
        iters += 1
        res = float(np.linalg.norm(b - A.matvec(u)) / bnorm)
        res_hist.append(res)
        if res <= cfg.tol:
            converged = True
        elif not np.isfinite(res):
            break
    wall = time.perf_counter() - t0

    report = SolveReport(
        method="stationary",
        converged=bool(converged),
        iters=iters,
        res_history=res_hist,
        precond_res_history=[],
        final_res=res_hist[-1],
        wall_seconds=wall,
        alpha=alpha,
        alpha_bound=bound,
        within_bound=bool(alpha < bound),
    )
    return BlockVector(u, prob.p, prob.n, prob.q), report
