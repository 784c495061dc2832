"""HTTP surface of the verification engine.

The handlers are plain functions over the request/response models; the CLI
calls them in-process and the FastAPI routes expose the same behavior over
HTTP.  Checks are pure, so the service is stateless.
"""

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..catalog import build_scenario
from ..errors import BadDegree, BadParameters, EngineError, ScenarioError, UnknownCatalogName
from ..scenario import ScenarioModel, run_scenario
from .models import (
    CatalogRequest,
    CatalogResponse,
    CheckRequest,
    CheckResponse,
    HealthResponse,
)


def handle_check(request: CheckRequest) -> CheckResponse:
    report = run_scenario(request.scenario, seed=request.seed, samples=request.samples)
    return CheckResponse(report=report, exit_code=report.exit_code())


def handle_catalog(request: CatalogRequest) -> CatalogResponse:
    document = build_scenario(request.name, request.params)
    return CatalogResponse(scenario=ScenarioModel.model_validate(document))


def create_app() -> FastAPI:
    app = FastAPI(
        title="msk",
        description="Exact verification of multisymplectic structures on charts",
        version=__version__,
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/check", response_model=CheckResponse)
    def check(request: CheckRequest) -> CheckResponse:
        try:
            return handle_check(request)
        except ScenarioError as err:
            raise HTTPException(status_code=422, detail=str(err))
        except EngineError as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/catalog", response_model=CatalogResponse)
    def catalog(request: CatalogRequest) -> CatalogResponse:
        try:
            return handle_catalog(request)
        except (UnknownCatalogName, BadParameters, BadDegree) as err:
            raise HTTPException(status_code=422, detail=str(err))
        except EngineError as err:
            raise HTTPException(status_code=400, detail=str(err))

    return app


app = create_app()
