"""Spectrum tools for the preconditioned operators.

With P the parameterized full-structure preconditioner on the residual
system, the spectrum of P^{-1} A is {1} with multiplicity p + q together
with the n real values

    theta_i = mu_i / (mu_i - alpha),

one per eigenvalue mu_i of S.  Likewise the iteration matrix P^{-1} Q has
eigenvalues lambda_i = alpha / (alpha - mu_i) (plus p + q zeros), and
theta = 1 - lambda.  Everything here is computed from the symmetric
eigensolve of S; an independent dense eigensolve of the assembled
preconditioned matrix doubles as the verification oracle.
"""

from dataclasses import dataclass

import numpy as np

from .dense import sym_eigen
from .precond import Method, setup
from .problem import SystemKind, assemble


def preconditioner_map(mus, alpha):
    """theta_i = mu_i / (mu_i - alpha); +inf where the shift is singular."""
    mus = np.asarray(mus, dtype=float)
    d = mus - alpha
    out = np.full(mus.shape, np.inf)
    ok = d != 0.0
    with np.errstate(over="ignore"):
        out[ok] = mus[ok] / d[ok]
    return out


def splitting_map(mus, alpha):
    """lambda_i = alpha / (alpha - mu_i); +inf where the shift is singular."""
    mus = np.asarray(mus, dtype=float)
    d = alpha - mus
    out = np.full(mus.shape, np.inf)
    ok = d != 0.0
    with np.errstate(over="ignore"):
        out[ok] = alpha / d[ok]
    if alpha == 0.0:
        out[:] = 0.0
    return out


@dataclass
class SpectrumReport:
    alpha: float
    lambda_min: float
    thetas: np.ndarray
    ones_multiplicity: int
    cluster_radius: float

    def full_spectrum(self):
        """All p + q + n eigenvalues of the preconditioned operator."""
        return np.concatenate([np.ones(self.ones_multiplicity), self.thetas])


def preconditioned_spectrum(prob, alpha, s_values=None):
    """Mapped spectrum of P^{-1} A for the residual system.

    Requires 0 <= alpha < lambda_min(S) so the shift stays SPD; the
    cluster radius max |theta_i - 1| = alpha / (lambda_min - alpha)
    measures how tightly everything gathers at (1, 0).
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    mus = np.asarray(
        s_values if s_values is not None else sym_eigen(prob.S).values, dtype=float
    )
    lam_min = float(mus.min())
    if alpha >= lam_min:
        raise ValueError(
            f"alpha = {alpha:.3e} must stay below lambda_min(S) = {lam_min:.3e}"
        )
    thetas = preconditioner_map(mus, alpha)
    radius = float(np.abs(thetas - 1.0).max()) if thetas.size else 0.0
    return SpectrumReport(
        alpha=float(alpha),
        lambda_min=lam_min,
        thetas=thetas,
        ones_multiplicity=prob.p + prob.q,
        cluster_radius=radius,
    )


def palpha_matvec(prob, alpha, v):
    """Product P v with the full-structure preconditioner (not its inverse)."""
    v = np.asarray(v, dtype=float)
    p, n = prob.p, prob.n
    v1, v2, v3 = v[:p], v[p : p + n], v[p + n :]
    return np.concatenate(
        [
            v1 + prob.A1.matvec(v2),
            prob.A1.rmatvec(v1) + alpha * v2 - prob.A2.rmatvec(v3),
            prob.A2.matvec(v2) + v3,
        ]
    )


def eigenpair_check(prob, alpha, mu, w):
    """Relative defect of the closed-form eigenpair of (A, P).

    For an eigenpair (mu, w) of S, the vector l = (-A1 w; w; -A2 w)
    satisfies A l = theta P l with theta = mu / (mu - alpha).  Returns
    ||A l - theta P l|| / ||l||.
    """
    if mu == alpha:
        raise ValueError("mu equals alpha: the map is singular there")
    w = np.asarray(w, dtype=float)
    ell = np.concatenate([-prob.A1.matvec(w), w, -prob.A2.matvec(w)])
    theta = mu / (mu - alpha)
    system = assemble(prob, SystemKind.RESIDUAL)
    defect = system.operator.matvec(ell) - theta * palpha_matvec(prob, alpha, ell)
    return float(np.linalg.norm(defect) / np.linalg.norm(ell))


def dense_operator_spectrum(system, precond=None):
    """Eigenvalues of the (preconditioned) operator via a dense eigensolve.

    Independent verification route: assembles the matrix explicitly and
    calls the general dense eigensolver, so it shares nothing with the
    closed-form map above.  Intended for small instances only; callers
    enforce a dimension cap.
    """
    dense = system.operator.to_dense()
    if precond is not None:
        dense = np.linalg.solve(precond.dense(), dense)
    return np.linalg.eigvals(dense)


def preconditioned_spectrum_oracle(prob, method, kind=None, alpha=None):
    """Dense-oracle spectrum for any method on its bound system."""
    method = Method(method)
    pc = setup(prob, method, kind=kind, alpha=alpha)
    system = assemble(prob, pc.kind)
    return dense_operator_spectrum(system, pc if method is not Method.NONE else None)
