"""HTTP service exposing every run type.

POST /run/{name} takes a full run configuration and returns the result
table plus a metadata block (tool version, config digest, unit
conventions, resolved config).  Error payloads carry the process exit
code the CLI should propagate: 2 for configuration errors, 3 for
physics-domain violations, 4 for numerical failures.
"""

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..errors import ConfigError, NumericsError, PhysicsDomainError
from .models import RunConfig, config_sha256
from .runners import RUNNERS

UNITS_NOTE = (
    "config frequencies in Hz; internal frequencies in rad/s; "
    "lengths in m; energies in J"
)


def jsonable(value):
    """Recursively map non-finite floats to null for strict JSON output."""
    if isinstance(value, float):
        return value if value == value and abs(value) != float("inf") else None
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def _error_payload(exit_code: int, message: str) -> dict:
    return {"error": {"exit_code": exit_code, "message": message}}


def _first_validation_message(exc: RequestValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err["loc"] if p != "body")
    return f"config invalid at '{loc}': {err['msg']}"


def create_app() -> FastAPI:
    from .. import __version__

    app = FastAPI(title="ionqft", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content=_error_payload(2, _first_validation_message(exc)),
        )

    @app.exception_handler(ConfigError)
    async def on_config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content=_error_payload(2, str(exc)))

    @app.exception_handler(PhysicsDomainError)
    async def on_domain_error(request: Request, exc: PhysicsDomainError):
        return JSONResponse(status_code=409, content=_error_payload(3, str(exc)))

    @app.exception_handler(NumericsError)
    async def on_numerics_error(request: Request, exc: NumericsError):
        return JSONResponse(status_code=500, content=_error_payload(4, str(exc)))

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/runs")
    async def runs() -> dict:
        return {"runs": sorted(RUNNERS)}

    @app.post("/run/{name}")
    async def run(name: str, config: RunConfig) -> JSONResponse:
        runner = RUNNERS.get(name)
        if runner is None:
            return JSONResponse(
                status_code=404,
                content=_error_payload(
                    2, f"unknown run '{name}'; choose from {sorted(RUNNERS)}"
                ),
            )
        result = runner(config)
        payload = {
            "metadata": {
                "tool": "ionqft",
                "version": __version__,
                "config_sha256": config_sha256(config),
                "units": UNITS_NOTE,
                "config": config.model_dump(mode="json"),
            },
            "columns": result["columns"],
            "rows": jsonable(result["rows"]),
            "summary": jsonable(result["summary"]),
            "notes": result["notes"],
        }
        return JSONResponse(content=payload)
    return app
