"""Command-line front end.

Every command builds the same request models the HTTP service accepts
and either calls the handlers in process (default) or POSTs them to a
running server via --server.  Exit codes: 0 success, 2 invalid input or
failed validation, 3 solver did not converge (the report is still
written).
"""

import json
import sys

import click

from .errors import GenerationError, MtxFormatError, ProblemValidationError
from .mtxio import json_safe, write_csv, write_report_json
from .service import handlers, schemas

TALL_BENCH_CONFIGS = ((256, 100, 128), (300, 212, 256), (524, 500, 512), (1048, 1000, 1024))

BENCH_COLUMNS = [
    "problem",
    "method",
    "system",
    "alpha",
    "it",
    "res",
    "err",
    "setup_seconds",
    "iterate_seconds",
    "wall_seconds",
    "converged",
    "seed",
    "error",
]
SWEEP_COLUMNS = ["alpha", "it", "res", "wall_seconds", "converged", "flagged", "note"]
SPECTRUM_COLUMNS = ["re", "im", "method", "alpha"]

_INPUT_ERRORS = (
    ProblemValidationError,
    GenerationError,
    MtxFormatError,
    FileNotFoundError,
    ValueError,
)


class InputError(click.ClickException):
    exit_code = 2


_ROUTES = {
    "solve": ("/solve", handlers.handle_solve, schemas.SolveResponse),
    "bench": ("/bench", handlers.handle_bench, schemas.BenchResponse),
    "sweep-alpha": ("/sweep-alpha", handlers.handle_sweep, schemas.SweepResponse),
    "spectrum": ("/spectrum", handlers.handle_spectrum, schemas.SpectrumResponse),
    "generate": ("/generate", handlers.handle_generate, schemas.GenerateResponse),
    "validate": ("/validate", handlers.handle_validate, schemas.ValidateResponse),
}


def dispatch(command, request, server):
    """Run a command locally or against a remote server, same contract."""
    route, handler, response_model = _ROUTES[command]
    if not server:
        try:
            return handler(request)
        except _INPUT_ERRORS as exc:
            raise InputError(str(exc)) from exc
    import httpx

    reply = httpx.post(
        server.rstrip("/") + route,
        json=request.model_dump(mode="json"),
        timeout=600.0,
    )
    if reply.status_code == 422:
        try:
            detail = reply.json().get("detail", reply.text)
        except ValueError:
            detail = reply.text
        raise InputError(str(detail))
    reply.raise_for_status()
    return response_model.model_validate(reply.json())


def source_options(fn):
    fn = click.option("--eps", type=float, default=1e-4, show_default=True,
                      help="Perturbation size for --tls instances.")(fn)
    fn = click.option("--a2-scale", type=float, default=0.3, show_default=True,
                      help="Scale of the identity block A2 for --mtx problems.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True,
                      help="RNG seed for generated data.")(fn)
    fn = click.option("--q", "q", type=int, default=None,
                      help="Rows of A2 for --mtx problems [default: ceil(p/4)].")(fn)
    fn = click.option("--tls", "tls_dims", metavar="P,Q,N",
                      help="Synthetic total least squares instance sizes.")(fn)
    fn = click.option("--mtx", "mtx_path", type=click.Path(), metavar="FILE",
                      help="Matrix Market file supplying A1.")(fn)
    return fn


def solver_options(fn):
    fn = click.option("--restart", type=int, default=None,
                      help="GMRES restart length (full method if omitted).")(fn)
    fn = click.option("--maxit", type=int, default=1500, show_default=True)(fn)
    fn = click.option("--tol", type=float, default=1e-8, show_default=True,
                      help="Relative true-residual stopping tolerance.")(fn)
    return fn


def server_option(fn):
    return click.option("--server", metavar="URL",
                        help="POST to a running `ilskit serve` instead of solving "
                             "in process.")(fn)


def build_source(mtx_path, tls_dims, q, seed, a2_scale, eps):
    if (mtx_path is None) == (tls_dims is None):
        raise click.UsageError("provide exactly one of --mtx or --tls")
    if mtx_path is not None:
        return schemas.MtxSource(path=mtx_path, q=q, seed=seed, a2_scale=a2_scale)
    if q is not None:
        raise click.UsageError("--q applies to --mtx problems; --tls carries its own q")
    try:
        p, qq, n = (int(part) for part in tls_dims.split(","))
    except ValueError:
        raise click.UsageError(f"--tls expects P,Q,N integers, got {tls_dims!r}")
    return schemas.TlsSource(p=p, q=qq, n=n, eps=eps, seed=seed)


def parse_methods(raw):
    return [part.strip() for part in raw.split(",") if part.strip()]


def run_payload(problem, seed, run):
    """Flat report record for one run, documented keys first."""
    payload = {
        "method": run.method,
        "alpha": run.alpha,
        "problem": problem,
        "it": run.it,
        "res": run.res,
        "err": run.err,
        "wall_seconds": run.wall_seconds,
        "seed": seed,
        "system": run.system,
        "converged": run.converged,
        "res_normal": run.res_normal,
        "setup_seconds": run.setup_seconds,
        "iterate_seconds": run.iterate_seconds,
    }
    if run.error is not None:
        payload["error"] = run.error
    return payload


@click.group()
def main():
    """Sparse indefinite least squares solvers and benchmarks."""


@main.command()
@source_options
@solver_options
@server_option
@click.option("--method", type=click.Choice(schemas.METHOD_NAMES), default="palpha",
              show_default=True)
@click.option("--alpha", type=float, default=None,
              help="Shift for palpha [default: 1e-6 for --mtx, 1e-10 for --tls].")
@click.option("--system", type=click.Choice(["residual", "gram"]), default=None,
              help="Block system; fixed per method except `none`, which runs "
                   "both when unset.")
@click.option("--out", type=click.Path(), default=None, help="Also write the JSON report here.")
@click.pass_context
def solve(ctx, mtx_path, tls_dims, q, seed, a2_scale, eps, tol, maxit, restart,
          method, alpha, system, out, server):
    """Solve one problem with one method; JSON report to stdout."""
    source = build_source(mtx_path, tls_dims, q, seed, a2_scale, eps)
    request = schemas.SolveRequest(
        source=source,
        method=method,
        alpha=alpha,
        system=system,
        options=schemas.SolverOptions(tol=tol, maxit=maxit, restart=restart),
    )
    resp = dispatch("solve", request, server)
    payloads = [run_payload(resp.problem, resp.seed, run) for run in resp.runs]
    document = payloads[0] if len(payloads) == 1 else payloads
    for run in resp.runs:
        note = run.error or ""
        click.echo(
            f"{run.method}[{run.system}] it={run.it} res={run.res} err={run.err} "
            f"wall={run.wall_seconds:.4f}s converged={run.converged} {note}".rstrip(),
            err=True,
        )
    click.echo(json.dumps(json_safe(document), indent=2))
    if out is not None:
        write_report_json(out, document)
    if any(not run.converged for run in resp.runs):
        ctx.exit(3)


@main.command()
@source_options
@solver_options
@server_option
@click.option("--tall-suite", is_flag=True,
              help="Run the four built-in tall TLS benchmark sizes instead of --mtx/--tls.")
@click.option("--methods", default=",".join(schemas.METHOD_NAMES), show_default=True,
              help="Comma-separated method list; empty gives a header-only table.")
@click.option("--alpha", type=float, default=None, help="Shift for the palpha rows.")
@click.option("--out", type=click.Path(), default=None, help="CSV path [default: stdout].")
def bench(mtx_path, tls_dims, q, seed, a2_scale, eps, tol, maxit, restart,
          tall_suite, methods, alpha, out, server):
    """Benchmark methods over one or more problems; CSV table output."""
    method_list = parse_methods(methods)
    if tall_suite:
        if mtx_path is not None or tls_dims is not None:
            raise click.UsageError("--tall-suite replaces --mtx/--tls")
        cases = [
            schemas.BenchCase(
                source=schemas.TlsSource(p=p, q=qq, n=n, eps=eps, seed=seed),
                methods=method_list,
                alpha=alpha,
            )
            for (p, qq, n) in TALL_BENCH_CONFIGS
        ]
    else:
        source = build_source(mtx_path, tls_dims, q, seed, a2_scale, eps)
        cases = [schemas.BenchCase(source=source, methods=method_list, alpha=alpha)]
    request = schemas.BenchRequest(
        cases=cases,
        options=schemas.SolverOptions(tol=tol, maxit=maxit, restart=restart),
    )
    resp = dispatch("bench", request, server)
    rows = [row.model_dump() for row in resp.rows]
    write_csv(out if out is not None else sys.stdout, rows, columns=BENCH_COLUMNS)


@main.command(name="sweep-alpha")
@source_options
@solver_options
@server_option
@click.option("--alphas", default=",".join(f"{a:g}" for a in schemas.DEFAULT_ALPHA_GRID),
              show_default=True, help="Comma-separated shift grid.")
@click.option("--out", type=click.Path(), default=None, help="CSV path [default: stdout].")
def sweep_alpha(mtx_path, tls_dims, q, seed, a2_scale, eps, tol, maxit, restart,
                alphas, out, server):
    """Sweep the palpha shift over a grid; CSV of (alpha, it, wall)."""
    source = build_source(mtx_path, tls_dims, q, seed, a2_scale, eps)
    try:
        grid = [float(part) for part in parse_methods(alphas)]
    except ValueError:
        raise click.UsageError(f"--alphas expects comma-separated floats, got {alphas!r}")
    request = schemas.SweepRequest(
        source=source,
        alphas=grid,
        options=schemas.SolverOptions(tol=tol, maxit=maxit, restart=restart),
    )
    resp = dispatch("sweep-alpha", request, server)
    click.echo(f"alpha_bound={resp.alpha_bound}", err=True)
    rows = [row.model_dump() for row in resp.rows]
    write_csv(out if out is not None else sys.stdout, rows, columns=SWEEP_COLUMNS)


@main.command()
@source_options
@server_option
@click.option("--methods", default="none,palpha", show_default=True,
              help="Comma-separated list; `none` emits both raw block systems, "
                   "baselines use the dense eigensolve.")
@click.option("--alpha", type=float, default=None, help="Shift for the palpha spectrum.")
@click.option("--oracle-cap", type=int, default=None,
              help="Dense-eigensolve dimension cap [default: env ILS_ORACLE_CAP or 1500].")
@click.option("--out", type=click.Path(), default=None, help="CSV path [default: stdout].")
def spectrum(mtx_path, tls_dims, q, seed, a2_scale, eps, methods, alpha, oracle_cap,
             out, server):
    """Eigenvalue scatter data for the block operators; CSV of (re, im)."""
    source = build_source(mtx_path, tls_dims, q, seed, a2_scale, eps)
    request = schemas.SpectrumRequest(
        source=source,
        methods=parse_methods(methods),
        alpha=alpha,
        oracle_cap=oracle_cap,
    )
    resp = dispatch("spectrum", request, server)
    for notice in resp.notices:
        click.echo(f"notice: {notice}", err=True)
    if resp.cluster_radius is not None:
        click.echo(
            f"lambda_min={resp.lambda_min} cluster_radius={resp.cluster_radius}",
            err=True,
        )
    rows = [point.model_dump() for point in resp.points]
    write_csv(out if out is not None else sys.stdout, rows, columns=SPECTRUM_COLUMNS)


@main.command()
@source_options
@server_option
@click.option("--out-dir", type=click.Path(), required=True,
              help="Directory for a1/a2/b1/b2 Matrix Market files plus manifest.json.")
def generate(mtx_path, tls_dims, q, seed, a2_scale, eps, out_dir, server):
    """Write a problem instance to disk with a manifest."""
    source = build_source(mtx_path, tls_dims, q, seed, a2_scale, eps)
    request = schemas.GenerateRequest(source=source, out_dir=out_dir)
    resp = dispatch("generate", request, server)
    click.echo(json.dumps(json_safe(resp.manifest), indent=2))


@main.command()
@source_options
@server_option
@click.pass_context
def validate(ctx, mtx_path, tls_dims, q, seed, a2_scale, eps, server):
    """Check problem well-posedness; exit 2 if S is not positive definite."""
    source = build_source(mtx_path, tls_dims, q, seed, a2_scale, eps)
    request = schemas.ValidateRequest(source=source)
    resp = dispatch("validate", request, server)
    click.echo(json.dumps(json_safe(resp.model_dump()), indent=2))
    if not resp.spd:
        ctx.exit(2)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
