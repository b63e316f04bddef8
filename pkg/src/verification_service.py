"""
Verification service: runs registered scenarios and assembles reports.

This module provides the orchestration used by both the CLI and the HTTP API:
- Running one scenario with resolved tolerance, windows and seed
- Window sweeps with an empirical convergence-order table
- Running a directory of scenario files in parallel
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, PositiveInt, ValidationError

from src.config import LabSettings, load_settings
from src.cz import TolerancePolicy
from src.errors import LabError
from src.reports import ConvergenceRow, Report, ReportRow, sort_rows
from src.scenarios import SCENARIOS, RunContext, ScenarioKind, ScenarioSpec, get_scenario

logger = logging.getLogger(__name__)


class Scenario(BaseModel):
    """A scenario request: registered name, parameters and optional overrides."""

    name: str
    params: dict[str, Any] = Field(default_factory=dict)
    tolerance: TolerancePolicy | None = None
    windows: list[PositiveInt] | None = None


def convergence_table(rows: list[ReportRow]) -> list[ConvergenceRow]:
    """
    Error per label and window with the order log₂(err_prev/err_N) / log₂(N/N_prev).

    The order is left empty when either error is exactly zero.
    """
    records = [
        {"label": row.label, "N": row.N, "abs_err": row.abs_err} for row in rows if row.N is not None
    ]
    if not records:
        return []
    frame = pd.DataFrame.from_records(records).sort_values(["label", "N"], kind="stable")
    frame = frame.reset_index(drop=True)
    grouped = frame.groupby("label", sort=False)
    prev_err = grouped["abs_err"].shift(1)
    prev_n = grouped["N"].shift(1)
    with np.errstate(divide="ignore", invalid="ignore"):
        order = np.log2(prev_err / frame["abs_err"]) / np.log2(frame["N"] / prev_n)
    frame["order"] = order.where((prev_err > 0) & (frame["abs_err"] > 0) & (frame["N"] > prev_n))
    return [
        ConvergenceRow(
            label=record["label"],
            N=int(record["N"]),
            abs_err=float(record["abs_err"]),
            order=None if pd.isna(record["order"]) else float(record["order"]),
        )
        for record in frame.to_dict(orient="records")
    ]


class VerificationService:
    """Service for running lab scenarios against the lab settings."""

    def __init__(self, root_dir: str | Path = "./test_data"):
        """
        Initialize the verification service.

        Args:
            root_dir: Directory holding ``settings.yaml`` and ``scenarios/``
        """
        self.root_dir = Path(root_dir)
        self.settings_path = self.root_dir / "settings.yaml"
        self.scenarios_dir = self.root_dir / "scenarios"
        self._config: LabSettings | None = None

    def _load_config(self) -> LabSettings:
        """
        Load lab settings from settings.yaml.

        Returns:
            LabSettings instance

        Raises:
            FileNotFoundError: If settings.yaml does not exist
        """
        if self._config is None:
            self._config = load_settings(self.settings_path)
        return self._config

    def settings_problem(self) -> str | None:
        """Why settings.yaml cannot be used, or None when it loads."""
        try:
            self._load_config()
        except FileNotFoundError:
            return f"missing {self.settings_path}"
        except LabError as e:
            return str(e)
        return None

    def list_scenarios(self) -> list[dict[str, Any]]:
        """Registered scenarios with their default parameters, sorted by name."""
        return [
            {
                "name": spec.name,
                "kind": spec.kind.value,
                "windowed": spec.windowed,
                "description": spec.description,
                "default_params": spec.default_params(),
                "default_windows": list(spec.default_windows) if spec.default_windows else None,
            }
            for spec in sorted(SCENARIOS.values(), key=lambda s: s.name)
        ]

    def load_scenario_file(self, path: str | Path) -> Scenario:
        """
        Read one scenario request from a JSON file.

        Raises:
            FileNotFoundError: If the file does not exist
            LabError: ``BadConfig`` for malformed JSON or a schema violation
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Scenario file not found: {path}")
        try:
            with open(path, encoding="utf-8") as f:
                return Scenario.model_validate(json.load(f))
        except (json.JSONDecodeError, ValidationError) as e:
            raise LabError("BadConfig", f"{path}: {e}") from e

    def _context(self, spec: ScenarioSpec, request: Scenario) -> RunContext:
        settings = self._load_config()
        if request.tolerance is not None:
            tolerance = request.tolerance
        elif spec.kind is ScenarioKind.EXACT:
            tolerance = settings.tolerance.exact
        else:
            tolerance = settings.tolerance.truncation
        windows = request.windows or spec.default_windows or settings.windows
        return RunContext(
            name=spec.name,
            windows=tuple(sorted(set(windows))),
            guard=settings.guard,
            tolerance=tolerance,
            seed=settings.seed,
        )

    def run_scenario(self, request: Scenario) -> Report:
        """
        Run one scenario.

        Numerical failures inside the scenario are recorded in the report's
        ``error`` field; request problems are raised.

        Args:
            request: Scenario name, parameters and optional overrides

        Returns:
            Report with sorted rows and measured constants

        Raises:
            LabError: ``UnknownScenario`` or ``BadParams``
            FileNotFoundError: If settings.yaml does not exist
        """
        spec = get_scenario(request.name)
        params = spec.parse_params(request.params)
        ctx = self._context(spec, request)
        report = Report(
            scenario=spec.name,
            inputs=params.model_dump(mode="json"),
            tolerance=ctx.tolerance,
            windows=list(ctx.windows) if spec.windowed else [],
        )

        logger.info("Running scenario %s", spec.name)
        start = time.perf_counter()
        try:
            outcome = spec.runner(params, ctx)
            report.rows = sort_rows(outcome.rows)
            report.constants = outcome.constants
        except LabError as e:
            if e.is_config_error:
                raise
            logger.warning("Scenario %s failed: %s", spec.name, e)
            report.error = str(e)
        except Exception as e:
            logger.exception("Scenario %s raised unexpectedly", spec.name)
            report.error = f"{type(e).__name__}: {e}"
        report.timing = {"wall_time_s": time.perf_counter() - start}

        for row in report.failing_rows():
            logger.warning(
                "%s: %s (N=%s) abs_err %.3e > %.3e",
                spec.name,
                row.label,
                row.N,
                row.abs_err,
                row.threshold,
            )
        logger.info(
            "Finished scenario %s: %s in %.2fs",
            spec.name,
            "pass" if report.passed else "FAIL",
            report.timing["wall_time_s"],
        )
        return report

    def sweep(self, request: Scenario) -> Report:
        """
        Run a scenario over a window sweep and add the convergence table.

        Scenarios without truncation are rerun at every window, so their rows
        still appear once per N.

        Raises:
            LabError: ``NeedTwoWindows`` for fewer than two windows, or
                anything :meth:`run_scenario` raises
        """
        spec = get_scenario(request.name)
        windows = sorted(set(request.windows or spec.default_windows or self._load_config().windows))
        if len(windows) < 2:
            raise LabError("NeedTwoWindows", f"sweep of {spec.name} got windows {windows}")

        if spec.windowed:
            report = self.run_scenario(request.model_copy(update={"windows": windows}))
        else:
            singles = [
                self.run_scenario(request.model_copy(update={"windows": [N]})) for N in windows
            ]
            report = singles[0]
            report.rows = sort_rows(
                [
                    row.model_copy(update={"N": N})
                    for N, single in zip(windows, singles, strict=True)
                    for row in single.rows
                ]
            )
            report.error = next((single.error for single in singles if single.error), None)
            report.windows = windows
            report.timing = {"wall_time_s": sum(s.timing["wall_time_s"] for s in singles)}

        report.convergence = convergence_table(report.rows)
        return report

    def run_all(self, config_dir: str | Path | None = None) -> list[Report]:
        """
        Run a directory of scenario files, or every registered scenario.

        Args:
            config_dir: Directory of ``*.json`` scenario files; when omitted,
                every registered scenario runs with its defaults

        Returns:
            Reports sorted by scenario name

        Raises:
            FileNotFoundError: If ``config_dir`` does not exist
        """
        if config_dir is None:
            requests = [Scenario(name=name) for name in sorted(SCENARIOS)]
        else:
            config_dir = Path(config_dir)
            if not config_dir.is_dir():
                raise FileNotFoundError(f"Scenario directory not found: {config_dir}")
            requests = [self.load_scenario_file(p) for p in sorted(config_dir.glob("*.json"))]
        for request in requests:
            get_scenario(request.name)

        threads = self._load_config().threads
        logger.info("Running %d scenarios on %d threads", len(requests), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(self.run_scenario, requests))
        return sorted(reports, key=lambda r: r.scenario)
