"""
Verification reports and their JSON / Markdown encodings.

A report echoes the scenario inputs, lists one row per checked quantity (and per
window N for truncated checks) and records the constants measured on the way.
Wall-clock timing sits in its own field so that two runs can be diffed with
``include_timing=False``.
"""

import json
import math
from collections.abc import Sequence
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, computed_field

from src.cz import CZValue, TolerancePolicy


class ReportFormat(str, Enum):
    JSON = "json"
    MARKDOWN = "md"


class ComplexValue(BaseModel):
    """A complex number as a JSON object."""

    re: float
    im: float = 0.0

    @classmethod
    def of(cls, z: complex | float | CZValue) -> "ComplexValue":
        if isinstance(z, CZValue):
            z = z.rep
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def __str__(self) -> str:
        if self.im == 0.0:
            return f"{self.re:.12g}"
        return f"{self.re:.12g}{self.im:+.12g}i"


class ReportRow(BaseModel):
    """One comparison lhs ≈ rhs under the scenario's tolerance."""

    model_config = ConfigDict(populate_by_name=True)

    label: str
    N: int | None = None
    lhs: ComplexValue
    rhs: ComplexValue
    abs_err: float
    threshold: float
    passed: bool = Field(alias="pass")


class ConvergenceRow(BaseModel):
    """Error at one window and the empirical order against the previous window."""

    label: str
    N: int
    abs_err: float
    order: float | None = None


class Report(BaseModel):
    """Outcome of one scenario run."""

    scenario: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    tolerance: TolerancePolicy
    windows: list[int] = Field(default_factory=list)
    rows: list[ReportRow] = Field(default_factory=list)
    constants: dict[str, Any] = Field(default_factory=dict)
    convergence: list[ConvergenceRow] | None = None
    error: str | None = None
    timing: dict[str, float] = Field(default_factory=dict)

    @computed_field
    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.rows) and all(row.passed for row in self.rows)

    def failing_rows(self) -> list[ReportRow]:
        return [row for row in self.rows if not row.passed]


def make_row(
    label: str,
    lhs: complex | float,
    rhs: complex | float,
    tolerance: TolerancePolicy,
    N: int | None = None,
    abs_err: float | None = None,
) -> ReportRow:
    """
    Compare two numbers and record the outcome.

    Args:
        label: Name of the checked quantity
        lhs: Computed value
        rhs: Reference value
        tolerance: Policy giving the allowed error at the scale of ``rhs``
        N: Window size, for truncated checks
        abs_err: Precomputed error (for example a distance in ℂ/ℤ)

    Returns:
        ReportRow with ``pass`` set from the tolerance
    """
    if abs_err is None:
        abs_err = abs(complex(lhs) - complex(rhs))
    threshold = tolerance.threshold(abs(complex(rhs)))
    return ReportRow(
        label=label,
        N=N,
        lhs=ComplexValue.of(lhs),
        rhs=ComplexValue.of(rhs),
        abs_err=float(abs_err),
        threshold=threshold,
        passed=bool(math.isfinite(abs_err) and abs_err <= threshold),
    )


def make_cz_row(
    label: str, lhs: CZValue, rhs: CZValue, tolerance: TolerancePolicy, N: int | None = None
) -> ReportRow:
    """Row comparing two classes in ℂ/ℤ by their distance."""
    return make_row(label, lhs.rep, rhs.rep, tolerance, N=N, abs_err=lhs.distance(rhs))


def sort_rows(rows: Sequence[ReportRow]) -> list[ReportRow]:
    """Rows ordered by label, then window."""
    return sorted(rows, key=lambda row: (row.label, -1 if row.N is None else row.N))


def _dump(report: Report, include_timing: bool) -> dict[str, Any]:
    exclude = None if include_timing else {"timing"}
    return report.model_dump(mode="json", by_alias=True, exclude=exclude)


def emit(
    reports: Sequence[Report], fmt: ReportFormat | str = ReportFormat.JSON, include_timing: bool = True
) -> str:
    """
    Render reports as JSON or Markdown.

    Args:
        reports: Reports in any order; they are emitted sorted by scenario name
        fmt: ``json`` or ``md``
        include_timing: Drop the timing field when False, for diffing runs

    Returns:
        The rendered document; an empty list still gives a valid document
    """
    fmt = ReportFormat(fmt)
    ordered = sorted(reports, key=lambda r: r.scenario)
    if fmt is ReportFormat.JSON:
        payload = {
            "passed": all(r.passed for r in ordered),
            "reports": [_dump(r, include_timing) for r in ordered],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    lines = ["# Verification report", ""]
    if not ordered:
        lines += ["_No scenarios were run._", ""]
    for report in ordered:
        status = "PASS" if report.passed else "FAIL"
        lines += [f"## {report.scenario}: {status}", ""]
        if report.error:
            lines += [f"Error: `{report.error}`", ""]
        if report.rows:
            lines += [
                "| check | N | lhs | rhs | abs_err | pass |",
                "|---|---|---|---|---|---|",
            ]
            for row in report.rows:
                n = "" if row.N is None else str(row.N)
                lines.append(
                    f"| {row.label} | {n} | {row.lhs} | {row.rhs} | {row.abs_err:.3e} | "
                    f"{'yes' if row.passed else 'no'} |"
                )
            lines.append("")
        if report.convergence:
            lines += ["| check | N | abs_err | order |", "|---|---|---|---|"]
            for conv in report.convergence:
                order = "" if conv.order is None else f"{conv.order:.2f}"
                lines.append(f"| {conv.label} | {conv.N} | {conv.abs_err:.3e} | {order} |")
            lines.append("")
        if report.constants:
            lines += ["Constants:", ""]
            lines += [f"- {key}: {value}" for key, value in sorted(report.constants.items())]
            lines.append("")
    return "\n".join(lines)


def load_reports(text: str) -> list[Report]:
    """Parse the JSON produced by :func:`emit`."""
    data = json.loads(text)
    return [Report.model_validate(item) for item in data.get("reports", [])]
