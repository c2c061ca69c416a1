"""Command handlers shared by the HTTP app and the CLI.

Each handler takes a request model and returns a response model; the
FastAPI routes and the in-process CLI path both call straight into
these functions, so behaviour cannot drift between the two front ends.
"""

import os
import time

import numpy as np

from ..errors import BreakdownError, GenerationError, NotSpdError, ProblemValidationError
from ..krylov import SolverConfig, gmres
from ..mtxio import read_mtx, write_mtx, write_mtx_array, write_report_json
from ..precond import Method, setup, system_for_method
from ..problem import (
    SystemKind,
    assemble,
    default_q,
    problem_from_matrix,
    residual_metrics,
    tls_problem,
    validate,
    validate_parts,
)
from ..sparse import SparseMatrix
from ..spectral import dense_operator_spectrum, preconditioned_spectrum
from . import schemas

DEFAULT_ORACLE_CAP = 1500


def oracle_cap(requested=None):
    if requested is not None:
        return int(requested)
    return int(os.environ.get("ILS_ORACLE_CAP", DEFAULT_ORACLE_CAP))


def default_alpha(source):
    if source.kind == "tls":
        return schemas.DEFAULT_ALPHA_TLS
    return schemas.DEFAULT_ALPHA_MTX


def build_problem(source):
    """Materialize a problem from a source model.

    Returns (problem, descriptor, tls_instance_or_None).  Raises
    ProblemValidationError / GenerationError / MtxFormatError /
    FileNotFoundError on invalid input.
    """
    if source.kind == "mtx":
        A1 = read_mtx(source.path)
        prob = problem_from_matrix(
            A1, q=source.q, seed=source.seed, a2_scale=source.a2_scale
        )
        descriptor = {
            "kind": "mtx",
            "path": source.path,
            "p": prob.p,
            "n": prob.n,
            "q": prob.q,
            "seed": source.seed,
            "a2_scale": source.a2_scale,
        }
        return prob, descriptor, None
    inst = tls_problem(source.p, source.q, source.n, eps=source.eps, seed=source.seed)
    prob = inst.problem
    descriptor = {
        "kind": "tls",
        "p": prob.p,
        "q": prob.q,
        "n": prob.n,
        "eps": source.eps,
        "seed": source.seed,
        "sigma": inst.sigma,
    }
    return prob, descriptor, inst


def problem_label(descriptor):
    if descriptor["kind"] == "mtx":
        stem = os.path.splitext(os.path.basename(descriptor["path"]))[0]
        return f"mtx:{stem}(q={descriptor['q']})"
    return "tls(p={p},q={q},n={n})".format(**descriptor)


def _resolve_alpha(method, alpha, source):
    if method == Method.PALPHA:
        return default_alpha(source) if alpha is None else float(alpha)
    if alpha is not None:
        raise ValueError(f"alpha applies only to the palpha method, not {method.value!r}")
    return None


def _finite(x):
    """JSON responses reject NaN/inf, so non-finite metrics become null."""
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else None


def run_single(prob, xref, method, kind, alpha, options):
    """One GMRES run; failures come back as an error row, never an exception."""
    method = Method(method)
    result = schemas.RunResult(
        method=method.value, system=kind.value, alpha=alpha
    )
    cfg = SolverConfig(tol=options.tol, maxit=options.maxit, restart=options.restart)
    try:
        t0 = time.perf_counter()
        pc = setup(prob, method, kind=kind, alpha=alpha)
        system = assemble(prob, kind)
        result.setup_seconds = time.perf_counter() - t0
        precond = None if method == Method.NONE else pc
        u, rep = gmres(
            system, precond, cfg=cfg, u0=prob.initial_guess(), method_label=method.value
        )
        metrics = residual_metrics(prob, system, u, xref)
        result.it = rep.iters
        result.res = _finite(rep.final_res)
        result.err = _finite(metrics.err)
        result.res_normal = _finite(metrics.res_normal)
        result.converged = rep.converged
        result.breakdown = rep.breakdown
        result.iterate_seconds = rep.wall_seconds
        result.wall_seconds = result.setup_seconds + rep.wall_seconds
    except (NotSpdError, BreakdownError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
        result.breakdown = isinstance(exc, BreakdownError)
    return result


def _kinds_for(method, system):
    """Systems to run: an explicit request narrows, none-with-no-system fans out."""
    method = Method(method)
    if system is not None:
        return [system_for_method(method, SystemKind(system))]
    if method == Method.NONE:
        return [SystemKind.RESIDUAL, SystemKind.GRAM]
    return [system_for_method(method)]


def handle_solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
    prob, descriptor, _ = build_problem(req.source)
    method = Method(req.method)
    alpha = _resolve_alpha(method, req.alpha, req.source)
    kinds = _kinds_for(method, req.system)
    xref = prob.direct_oracle()
    runs = [run_single(prob, xref, method, kind, alpha, req.options) for kind in kinds]
    return schemas.SolveResponse(problem=descriptor, seed=req.source.seed, runs=runs)


def handle_bench(req: schemas.BenchRequest) -> schemas.BenchResponse:
    rows = []
    for case in req.cases:
        label = case.label
        try:
            prob, descriptor, _ = build_problem(case.source)
            label = label or problem_label(descriptor)
            xref = prob.direct_oracle()
        except Exception as exc:  # noqa: BLE001 - a bad case must not kill the table
            rows.append(
                schemas.BenchRow(
                    problem=label or repr(case.source),
                    method="",
                    seed=case.source.seed,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        for name in case.methods:
            try:
                method = Method(name)
                # A case-level alpha configures palpha only; the baselines
                # ignore it rather than erroring out of their rows.
                alpha = _resolve_alpha(
                    method,
                    case.alpha if method == Method.PALPHA else None,
                    case.source,
                )
                kinds = _kinds_for(method, None)
            except ValueError as exc:
                rows.append(
                    schemas.BenchRow(
                        problem=label,
                        method=str(name),
                        seed=case.source.seed,
                        error=f"ValueError: {exc}",
                    )
                )
                continue
            for kind in kinds:
                run = run_single(prob, xref, method, kind, alpha, req.options)
                rows.append(
                    schemas.BenchRow(
                        problem=label,
                        method=run.method,
                        system=run.system,
                        alpha=run.alpha,
                        it=run.it if run.error is None else None,
                        res=run.res,
                        err=run.err,
                        setup_seconds=run.setup_seconds,
                        iterate_seconds=run.iterate_seconds,
                        wall_seconds=run.wall_seconds,
                        converged=run.converged,
                        seed=case.source.seed,
                        error=run.error,
                    )
                )
    return schemas.BenchResponse(rows=rows)


def handle_sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
    prob, descriptor, _ = build_problem(req.source)
    xref = prob.direct_oracle()
    report = validate(prob)
    rows = []
    for alpha in req.alphas:
        if alpha < 0:
            rows.append(
                schemas.SweepRow(alpha=alpha, flagged=True, note="alpha is negative")
            )
            continue
        run = run_single(
            prob, xref, Method.PALPHA, SystemKind.RESIDUAL, float(alpha), req.options
        )
        if run.error is not None:
            rows.append(
                schemas.SweepRow(alpha=alpha, flagged=True, note=run.error)
            )
        else:
            rows.append(
                schemas.SweepRow(
                    alpha=alpha,
                    it=run.it,
                    res=run.res,
                    wall_seconds=run.wall_seconds,
                    converged=run.converged,
                )
            )
    return schemas.SweepResponse(
        problem=descriptor,
        seed=req.source.seed,
        alpha_bound=report.alpha_max,
        rows=rows,
    )


def handle_spectrum(req: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
    prob, descriptor, _ = build_problem(req.source)
    cap = oracle_cap(req.oracle_cap)
    alpha = default_alpha(req.source) if req.alpha is None else float(req.alpha)
    points = []
    notices = []
    lambda_min = None
    cluster_radius = None
    for name in req.methods:
        method = Method(name)
        if method == Method.PALPHA:
            try:
                rep = preconditioned_spectrum(prob, alpha)
            except ValueError as exc:
                notices.append(f"palpha spectrum unavailable: {exc}")
                continue
            lambda_min = rep.lambda_min
            cluster_radius = rep.cluster_radius
            points.extend(
                schemas.SpectrumPoint(re=float(v), im=0.0, method="palpha", alpha=alpha)
                for v in rep.full_spectrum()
            )
            continue
        if prob.dim > cap:
            notices.append(
                f"dimension {prob.dim} exceeds the dense-oracle cap {cap}; "
                f"skipped {method.value} spectrum"
            )
            continue
        if method == Method.NONE:
            for kind in (SystemKind.RESIDUAL, SystemKind.GRAM):
                eigs = dense_operator_spectrum(assemble(prob, kind))
                points.extend(
                    schemas.SpectrumPoint(
                        re=float(v.real), im=float(v.imag), method=f"none:{kind.value}"
                    )
                    for v in eigs
                )
        else:
            kind = system_for_method(method)
            pc = setup(prob, method, kind=kind)
            eigs = dense_operator_spectrum(assemble(prob, kind), pc)
            points.extend(
                schemas.SpectrumPoint(
                    re=float(v.real), im=float(v.imag), method=method.value
                )
                for v in eigs
            )
    return schemas.SpectrumResponse(
        problem=descriptor,
        seed=req.source.seed,
        lambda_min=lambda_min,
        cluster_radius=cluster_radius,
        points=points,
        notices=notices,
    )


def handle_generate(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
    prob, descriptor, inst = build_problem(req.source)
    report = validate(prob)
    os.makedirs(req.out_dir, exist_ok=True)
    files = {}

    def emit(name, writer, payload):
        path = os.path.join(req.out_dir, name)
        writer(path, payload)
        files[os.path.splitext(name)[0]] = path

    emit("a1.mtx", write_mtx, prob.A1)
    emit("a2.mtx", write_mtx, prob.A2)
    emit("b1.mtx", write_mtx_array, prob.b1)
    emit("b2.mtx", write_mtx_array, prob.b2)
    manifest = {
        "problem": descriptor,
        "seed": req.source.seed,
        "lambda_min": report.lambda_min,
        "alpha_max": report.alpha_max,
        "files": {k: os.path.basename(v) for k, v in files.items()},
    }
    if inst is not None:
        manifest["sigma"] = inst.sigma
    manifest_path = os.path.join(req.out_dir, "manifest.json")
    write_report_json(manifest_path, manifest)
    files["manifest"] = manifest_path
    return schemas.GenerateResponse(out_dir=req.out_dir, files=files, manifest=manifest)


def handle_validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
    source = req.source
    if source.kind == "mtx":
        # Check the parts directly so an indefinite S is reported, not raised.
        A1 = read_mtx(source.path)
        q = default_q(A1.nrows) if source.q is None else source.q
        A2 = SparseMatrix.eye(q, A1.ncols, scale=source.a2_scale)
        report = validate_parts(A1, A2)
        descriptor = {
            "kind": "mtx",
            "path": source.path,
            "p": A1.nrows,
            "n": A1.ncols,
            "q": q,
            "seed": source.seed,
            "a2_scale": source.a2_scale,
        }
    else:
        try:
            prob, descriptor, _ = build_problem(source)
        except (ProblemValidationError, GenerationError) as exc:
            return schemas.ValidateResponse(
                problem=source.model_dump(),
                shapes_ok=True,
                spd=False,
                messages=[f"{type(exc).__name__}: {exc}"],
            )
        report = validate(prob)
    messages = [report.detail] if report.detail else []
    return schemas.ValidateResponse(
        problem=descriptor,
        shapes_ok=True,
        spd=report.spd,
        lambda_min=report.lambda_min,
        alpha_max=report.alpha_max,
        messages=messages,
    )
