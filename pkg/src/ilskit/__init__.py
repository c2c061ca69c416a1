"""Indefinite least squares via block 3x3 systems.

Core pieces: sparse CSR storage, dense kernels, problem generators and
block-system assembly, block preconditioners, left-preconditioned GMRES
plus the splitting iteration, and spectrum tools.  A FastAPI service and
a thin CLI sit on top (``ilskit.service``, ``ilskit.cli``).
"""

from .dense import (
    CholeskyFactor,
    SymEigen,
    chol_solve,
    cholesky,
    householder_qr_orthogonal,
    smallest_singular_value,
    sym_eigen,
)
from .errors import (
    BreakdownError,
    EigenConvergenceError,
    GenerationError,
    IlsError,
    MtxFormatError,
    NotSpdError,
    ProblemValidationError,
    RankDeficientError,
)
from .krylov import SolverConfig, SolveReport, gmres, splitting_spectral_radius, stationary
from .precond import Method, Preconditioner, setup, system_for_method
from .problem import (
    BlockSystem,
    BlockVector,
    IlsProblem,
    Metrics,
    SystemKind,
    TlsInstance,
    ValidationReport,
    assemble,
    default_q,
    problem_from_matrix,
    residual_metrics,
    tls_problem,
    validate,
    validate_parts,
)
from .sparse import SparseMatrix, gram_diff
from .spectral import (
    SpectrumReport,
    dense_operator_spectrum,
    eigenpair_check,
    palpha_matvec,
    preconditioned_spectrum,
    preconditioned_spectrum_oracle,
    preconditioner_map,
    splitting_map,
)

__version__ = "0.1.0"
