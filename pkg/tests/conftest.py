"""
Pytest configuration and fixtures for the lab tests.
"""

from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from src.fourier import TrigPoly, UnitFunction
from src.main import app
from src.operators import WindowSpec
from src.verification_service import VerificationService

# =============================================================================
# Endpoint Testing Fixtures
# =============================================================================


@pytest.fixture
def client() -> TestClient:
    """
    Create a FastAPI test client.

    Returns:
        TestClient instance for testing API endpoints
    """
    return TestClient(app)


@pytest.fixture
def eta_request() -> dict:
    """
    Small eta scenario request.

    Returns:
        Dictionary with a scenario request body
    """
    return {"name": "eta_closed_vs_zeta", "params": {"thetas": [1.0471975511965976]}}


# =============================================================================
# Service Layer Testing Fixtures
# =============================================================================


SETTINGS_YAML = """
tolerance:
  exact:
    abs_tol: 1.0e-9
  truncation:
    abs_tol: 1.0e-5
windows: [64, 128]
guard: 16
threads: 2
seed: 7
"""


@pytest.fixture
def lab_root(tmp_path) -> Path:
    """
    Create a temporary lab directory with settings.yaml and an empty scenarios/.

    Returns:
        Path to the temporary root directory
    """
    root = tmp_path / "lab"
    (root / "scenarios").mkdir(parents=True)
    (root / "settings.yaml").write_text(SETTINGS_YAML)
    return root


@pytest.fixture
def service(lab_root) -> VerificationService:
    """
    Create a VerificationService on the temporary lab directory.

    Returns:
        VerificationService instance
    """
    return VerificationService(root_dir=lab_root)


@pytest.fixture
def write_scenario(lab_root):
    """
    Write a scenario JSON file into the temporary scenarios/ directory.

    Returns:
        Function taking (file stem, JSON text) and returning the written path
    """

    def _write(stem: str, text: str) -> Path:
        path = lab_root / "scenarios" / f"{stem}.json"
        path.write_text(text)
        return path

    return _write


# =============================================================================
# Numerical Fixtures
# =============================================================================


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for randomized inputs."""
    return np.random.default_rng(20240601)


@pytest.fixture
def window() -> WindowSpec:
    """Window N=64 with guard 16."""
    return WindowSpec(64, 16)


@pytest.fixture
def wide_window() -> WindowSpec:
    """Window N=128 with guard 48, wide enough for smooth Toeplitz symbols."""
    return WindowSpec(128, 48)


@pytest.fixture
def small_units() -> tuple[UnitFunction, UnitFunction]:
    """The pair exp(0.3·e₁), exp(0.3·e₋₁)."""
    return (
        UnitFunction.exp(TrigPoly.from_coeffs({1: 0.3})),
        UnitFunction.exp(TrigPoly.from_coeffs({-1: 0.3})),
    )
