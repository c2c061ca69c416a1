import os

import numpy as np
import pytest

from ilskit import IlsProblem, SparseMatrix

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
TOLS_PATH = os.path.join(FIXTURES, "tols340_standin.mtx")
WELL_PATH = os.path.join(FIXTURES, "well1033_standin.mtx")


def controlled_instance(seed, p, q, n, smin=0.5, smax=8.0):
    """Random instance whose S = A1'A1 - A2'A2 has exactly known eigenvalues.

    Draw the target spectrum, set S = V diag(lam) V' for a random orthogonal
    V, then pick A1 = Q chol(S + A2'A2)' with orthonormal Q so the Gram
    difference reproduces S up to roundoff.  Returns (problem, lam_ascending).
    """
    rng = np.random.default_rng(seed)
    lam = np.geomspace(smin, smax, n)
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    S = (V * lam) @ V.T
    if q:
        A2 = rng.standard_normal((q, n)) * (0.3 / np.sqrt(q))
    else:
        A2 = np.zeros((0, n))
    G = S + A2.T @ A2
    R = np.linalg.cholesky((G + G.T) / 2.0).T
    Q, _ = np.linalg.qr(rng.standard_normal((p, n)))
    A1 = Q @ R
    b1 = rng.uniform(0.0, 1.0, p)
    b2 = rng.uniform(0.0, 1.0, q)
    prob = IlsProblem(
        SparseMatrix.from_dense(A1), SparseMatrix.from_dense(A2), b1, b2
    )
    return prob, np.sort(lam)


# ----------------------------------------------------------------------
# acceptance reporting: one line per criterion at the end of the run

ACCEPTANCE_RESULTS = []


def record_criterion(num, title, ok, detail="", warn_only=False):
    ACCEPTANCE_RESULTS.append((num, title, bool(ok), detail, warn_only))
    return bool(ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail, warn_only in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else ("WARN" if warn_only else "FAIL")
        line = f"criterion {num:>2}: {status} - {title}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def tols_matrix():
    from ilskit.mtxio import read_mtx

    return read_mtx(TOLS_PATH)


@pytest.fixture(scope="session")
def well_matrix():
    from ilskit.mtxio import read_mtx

    return read_mtx(WELL_PATH)
