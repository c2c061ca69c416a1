"""HTTP front end: one POST route per command, sharing the CLI handlers."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import GenerationError, MtxFormatError, ProblemValidationError
from . import handlers, schemas

_INPUT_ERRORS = (
    ProblemValidationError,
    GenerationError,
    MtxFormatError,
    FileNotFoundError,
    ValueError,
)


def create_app() -> FastAPI:
    app = FastAPI(title="ilskit", version=__version__)

    @app.exception_handler(Exception)
    async def _input_error(request: Request, exc: Exception):
        if isinstance(exc, _INPUT_ERRORS):
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        raise exc

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(req: schemas.SolveRequest):
        return handlers.handle_solve(req)

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest):
        return handlers.handle_bench(req)

    @app.post("/sweep-alpha", response_model=schemas.SweepResponse)
    def sweep_alpha(req: schemas.SweepRequest):
        return handlers.handle_sweep(req)

    @app.post("/spectrum", response_model=schemas.SpectrumResponse)
    def spectrum(req: schemas.SpectrumRequest):
        return handlers.handle_spectrum(req)

    @app.post("/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest):
        return handlers.handle_generate(req)

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest):
        return handlers.handle_validate(req)

    return app
