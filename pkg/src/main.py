"""
FastAPI application entry point for the verification lab.

This module exposes the scenario runner over HTTP: listing the registered
scenarios, running one scenario and running a window sweep.
"""

from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from src import __version__
from src.errors import LabError
from src.reports import Report
from src.verification_service import Scenario, VerificationService

# Create FastAPI app
app = FastAPI(
    title="Regulator Spectral Lab API",
    description="Numerical and exact verification of K-theory regulators and circle spectral invariants",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
)

# Initialize verification service
verification_service = VerificationService(root_dir="./test_data")


class HealthResponse(BaseModel):
    """Lab status: registered scenarios and whether the settings file loads."""

    status: str
    version: str
    message: str
    scenarios: int
    settings: str


class ScenarioInfo(BaseModel):
    """A registered scenario and its defaults."""

    name: str
    kind: str
    windowed: bool
    description: str
    default_params: dict[str, Any]
    default_windows: list[int] | None = None


def _http_error(e: LabError) -> HTTPException:
    status = 404 if e.code == "UnknownScenario" else 422
    return HTTPException(status_code=status, detail={"code": e.code, "detail": e.detail})


def _lab_status() -> HealthResponse:
    problem = verification_service.settings_problem()
    count = len(verification_service.list_scenarios())
    if problem is not None:
        return HealthResponse(
            status="degraded",
            version=__version__,
            message=f"Scenarios cannot run: {problem}",
            scenarios=count,
            settings=str(verification_service.settings_path),
        )
    return HealthResponse(
        status="healthy",
        version=__version__,
        message=f"Regulator Spectral Lab: {count} scenarios ready, POST /run to verify one",
        scenarios=count,
        settings=str(verification_service.settings_path),
    )


@app.get("/", response_model=HealthResponse)
async def root() -> HealthResponse:
    """Lab status with the number of registered scenarios."""
    return _lab_status()


@app.get("/health", response_model=HealthResponse)
async def health_check() -> HealthResponse:
    """Lab status; ``degraded`` when settings.yaml is missing or invalid."""
    return _lab_status()


@app.get("/scenarios", response_model=list[ScenarioInfo])
async def list_scenarios() -> list[ScenarioInfo]:
    """List the registered scenarios with their default parameters."""
    return [ScenarioInfo(**info) for info in verification_service.list_scenarios()]


@app.post("/run", response_model=Report)
def run_scenario(request: Scenario) -> Report:
    """
    Run one scenario.

    Args:
        request: Scenario name, parameters and optional tolerance/window overrides

    Returns:
        Report with one row per check
    """
    try:
        return verification_service.run_scenario(request)
    except LabError as e:
        raise _http_error(e) from e


@app.post("/sweep", response_model=Report)
def sweep(request: Scenario) -> Report:
    """
    Run one scenario over at least two windows.

    Args:
        request: Scenario request; ``windows`` falls back to the scenario defaults

    Returns:
        Report with rows per window and the convergence table
    """
    try:
        return verification_service.sweep(request)
    except LabError as e:
        raise _http_error(e) from e


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
