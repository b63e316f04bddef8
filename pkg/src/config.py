"""
Lab settings loaded from ``settings.yaml``.

The YAML file carries defaults (tolerances, window sizes, guard band, thread cap,
seed); the ``VERIFY_THREADS`` environment variable caps parallelism on top.
"""

import logging
import os
from pathlib import Path

import yaml
from pydantic import BaseModel, Field, ValidationError

from src.cz import EXACT_ABS_TOL, TRUNCATION_ABS_TOL, TolerancePolicy
from src.errors import LabError

logger = logging.getLogger(__name__)

THREADS_ENV = "VERIFY_THREADS"


class ToleranceSettings(BaseModel):
    """Default tolerance policies per scenario kind."""

    exact: TolerancePolicy = TolerancePolicy(abs_tol=EXACT_ABS_TOL)
    truncation: TolerancePolicy = TolerancePolicy(abs_tol=TRUNCATION_ABS_TOL)


class LabSettings(BaseModel):
    """Validated contents of ``settings.yaml``."""

    tolerance: ToleranceSettings = ToleranceSettings()
    windows: list[int] = Field(default_factory=lambda: [64, 128, 256])
    guard: int = Field(default=32, ge=0)
    threads: int = Field(default=1, ge=1)
    seed: int = 0


def threads_from_env(default: int) -> int:
    """Apply the ``VERIFY_THREADS`` cap, if set."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise LabError("BadParams", f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if value < 1:
        raise LabError("BadParams", f"{THREADS_ENV} must be positive, got {value}")
    return min(default, value)


def load_settings(settings_path: str | Path) -> LabSettings:
    """
    Load lab settings from a YAML file.

    Args:
        settings_path: Path to ``settings.yaml``

    Returns:
        LabSettings with the environment thread cap applied

    Raises:
        FileNotFoundError: If the settings file does not exist
        LabError: ``BadConfig`` if the file does not match the schema
    """
    settings_path = Path(settings_path)
    if not settings_path.exists():
        raise FileNotFoundError(f"Settings file not found: {settings_path}")

    with open(settings_path, encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}

    try:
        settings = LabSettings.model_validate(raw)
    except ValidationError as e:
        raise LabError("BadConfig", f"{settings_path}: {e}") from e

    threads = threads_from_env(settings.threads)
    logger.debug("Loaded settings from %s (threads=%d)", settings_path, threads)
    return settings.model_copy(update={"threads": threads})
