"""Request/response models for the solver service.

The CLI builds these same models and either calls the handlers in
process or POSTs them to a running server, so the schema is the single
wire contract for both paths.
"""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field

DEFAULT_ALPHA_MTX = 1e-6
DEFAULT_ALPHA_TLS = 1e-10
DEFAULT_ALPHA_GRID = (1e-10, 1e-8, 1e-6, 1e-4, 1e-2)

METHOD_NAMES = ("none", "bs1", "bs2", "bs3", "but", "palpha")


class MtxSource(BaseModel):
    """Problem built from a Matrix Market file: A2 = a2_scale * eye(q, n),
    b drawn uniform on (0, 1)."""

    kind: Literal["mtx"] = "mtx"
    path: str
    q: Optional[int] = Field(default=None, ge=0)
    seed: int = 0
    a2_scale: float = 0.3


class TlsSource(BaseModel):
    """Synthetic total least squares instance converted to an ILS problem."""

    kind: Literal["tls"] = "tls"
    p: int = Field(ge=1)
    q: int = Field(ge=0)
    n: int = Field(ge=1)
    eps: float = 1e-4
    seed: int = 0


ProblemSource = Annotated[Union[MtxSource, TlsSource], Field(discriminator="kind")]


class SolverOptions(BaseModel):
    tol: float = Field(default=1e-8, gt=0)
    maxit: int = Field(default=1500, ge=1)
    restart: Optional[int] = Field(default=None, ge=1)


class SolveRequest(BaseModel):
    source: ProblemSource
    method: str = "palpha"
    alpha: Optional[float] = None
    system: Optional[Literal["residual", "gram"]] = None
    options: SolverOptions = SolverOptions()


class RunResult(BaseModel):
    """One (method, system) GMRES run on one problem."""

    method: str
    system: str
    alpha: Optional[float] = None
    it: int = 0
    res: Optional[float] = None
    err: Optional[float] = None
    res_normal: Optional[float] = None
    converged: bool = False
    breakdown: bool = False
    setup_seconds: float = 0.0
    iterate_seconds: float = 0.0
    wall_seconds: float = 0.0
    error: Optional[str] = None


class SolveResponse(BaseModel):
    problem: dict
    seed: int
    runs: list[RunResult]


class BenchCase(BaseModel):
    source: ProblemSource
    methods: list[str] = list(METHOD_NAMES)
    alpha: Optional[float] = None
    label: Optional[str] = None


class BenchRequest(BaseModel):
    cases: list[BenchCase]
    options: SolverOptions = SolverOptions()


class BenchRow(BaseModel):
    problem: str
    method: str
    system: str = ""
    alpha: Optional[float] = None
    it: Optional[int] = None
    res: Optional[float] = None
    err: Optional[float] = None
    setup_seconds: Optional[float] = None
    iterate_seconds: Optional[float] = None
    wall_seconds: Optional[float] = None
    converged: bool = False
    seed: int = 0
    error: Optional[str] = None


class BenchResponse(BaseModel):
    rows: list[BenchRow]


class SweepRequest(BaseModel):
    source: ProblemSource
    alphas: list[float] = Field(default_factory=lambda: list(DEFAULT_ALPHA_GRID))
    options: SolverOptions = SolverOptions()


class SweepRow(BaseModel):
    alpha: float
    it: Optional[int] = None
    res: Optional[float] = None
    wall_seconds: Optional[float] = None
    converged: bool = False
    flagged: bool = False
    note: Optional[str] = None


class SweepResponse(BaseModel):
    problem: dict
    seed: int
    alpha_bound: Optional[float] = None
    rows: list[SweepRow]


class SpectrumRequest(BaseModel):
    source: ProblemSource
    methods: list[str] = ["none", "palpha"]
    alpha: Optional[float] = None
    oracle_cap: Optional[int] = Field(default=None, ge=1)


class SpectrumPoint(BaseModel):
    re: float
    im: float
    method: str
    alpha: Optional[float] = None


class SpectrumResponse(BaseModel):
    problem: dict
    seed: int
    lambda_min: Optional[float] = None
    cluster_radius: Optional[float] = None
    points: list[SpectrumPoint]
    notices: list[str] = Field(default_factory=list)


class GenerateRequest(BaseModel):
    source: ProblemSource
    out_dir: str


class GenerateResponse(BaseModel):
    out_dir: str
    files: dict[str, str]
    manifest: dict


class ValidateRequest(BaseModel):
    source: ProblemSource


class ValidateResponse(BaseModel):
    problem: dict
    shapes_ok: bool
    spd: bool
    lambda_min: Optional[float] = None
    alpha_max: Optional[float] = None
    messages: list[str] = Field(default_factory=list)
