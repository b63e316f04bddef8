"""
Tests for verification reports and their encodings.
"""

import json
import math

import pytest

from src.cz import TolerancePolicy, reduce
from src.reports import (
    ComplexValue,
    Report,
    ReportFormat,
    emit,
    load_reports,
    make_cz_row,
    make_row,
    sort_rows,
)

TOL = TolerancePolicy(abs_tol=1e-9)


def sample_report(name: str = "eta_closed_vs_zeta", passed: bool = True) -> Report:
    rhs = 0.5 if passed else 0.6
    return Report(
        scenario=name,
        inputs={"thetas": [1.0]},
        tolerance=TOL,
        rows=[make_row("eta[theta=1.000000]", 0.5, rhs, TOL)],
        constants={"index_sign": -1},
        timing={"wall_time_s": 0.01},
    )


# =============================================================================
# Rows
# =============================================================================


class TestRows:
    """Tests for row construction."""

    def test_make_row_pass(self):
        """Test a row within tolerance passes."""
        row = make_row("x", 1.0 + 1e-12, 1.0, TOL)
        assert row.passed
        assert row.threshold == pytest.approx(1e-9)

    def test_make_row_fail(self):
        """Test a row outside tolerance fails."""
        row = make_row("x", 1.1, 1.0, TOL)
        assert not row.passed
        assert row.abs_err == pytest.approx(0.1)

    def test_relative_tolerance(self):
        """Test the threshold scales with |rhs|."""
        row = make_row("x", 100.5, 100.0, TolerancePolicy(abs_tol=1e-9, rel_tol=0.01))
        assert row.passed

    def test_nan_fails(self):
        """Test a non-finite error never passes."""
        assert not make_row("x", math.nan, 0.0, TOL).passed

    def test_cz_row_uses_distance_mod_z(self):
        """Test [0.999…] and [0] are close in ℂ/ℤ."""
        row = make_cz_row("rho", reduce(1 - 1e-12), reduce(0.0), TOL)
        assert row.passed
        assert row.abs_err < 1e-11

    def test_sort_rows(self):
        """Test rows are ordered by label, then window with unwindowed rows first."""
        rows = [
            make_row("b", 0, 0, TOL, N=128),
            make_row("a", 0, 0, TOL, N=64),
            make_row("b", 0, 0, TOL),
            make_row("b", 0, 0, TOL, N=64),
        ]
        assert [(r.label, r.N) for r in sort_rows(rows)] == [
            ("a", 64),
            ("b", None),
            ("b", 64),
            ("b", 128),
        ]

    @pytest.mark.parametrize("z,text", [(0.5, "0.5"), (1 - 2j, "1-2i"), (0.25j, "0+0.25i")])
    def test_complex_value_str(self, z, text):
        """Test the compact complex rendering."""
        assert str(ComplexValue.of(z)) == text

    def test_complex_value_of_cz(self):
        """Test classes are stored by their representative."""
        assert ComplexValue.of(reduce(1.25 + 0.5j)) == ComplexValue(re=0.25, im=0.5)


# =============================================================================
# Reports
# =============================================================================


class TestReport:
    """Tests for the report model."""

    def test_passed(self):
        """Test a report with passing rows passes."""
        assert sample_report().passed

    def test_failing_rows(self):
        """Test failing rows are listed."""
        report = sample_report(passed=False)
        assert not report.passed
        assert [row.label for row in report.failing_rows()] == ["eta[theta=1.000000]"]

    def test_empty_report_does_not_pass(self):
        """Test a report without rows is not a pass."""
        assert not Report(scenario="x", tolerance=TOL).passed

    def test_error_fails(self):
        """Test a recorded error fails the report."""
        report = sample_report()
        report.error = "SingularDeterminant: pivot"
        assert not report.passed


class TestEmit:
    """Tests for JSON and Markdown output."""

    def test_json_layout(self):
        """Test the JSON document is sorted, uses the pass alias and ends with a newline."""
        text = emit([sample_report("zeta"), sample_report("alpha", passed=False)])
        assert text.endswith("\n")
        data = json.loads(text)
        assert data["passed"] is False
        assert [r["scenario"] for r in data["reports"]] == ["alpha", "zeta"]
        row = data["reports"][1]["rows"][0]
        assert row["pass"] is True
        assert "passed" not in row
        assert data["reports"][1]["passed"] is True

    def test_exclude_timing(self):
        """Test timing is dropped on request."""
        data = json.loads(emit([sample_report()], include_timing=False))
        assert "timing" not in data["reports"][0]

    def test_identical_runs_emit_identically(self):
        """Test output without timing only depends on the report content."""
        first = sample_report()
        second = sample_report()
        second.timing = {"wall_time_s": 99.0}
        assert emit([first], include_timing=False) == emit([second], include_timing=False)

    def test_empty_json(self):
        """Test an empty list is still a valid document."""
        assert json.loads(emit([])) == {"passed": True, "reports": []}

    def test_markdown(self):
        """Test the Markdown report has a section per scenario."""
        report = sample_report(passed=False)
        report.error = "NonFiniteValue: nan"
        text = emit([report], ReportFormat.MARKDOWN)
        assert text.startswith("# Verification report")
        assert "## eta_closed_vs_zeta: FAIL" in text
        assert "Error: `NonFiniteValue: nan`" in text
        assert "| eta[theta=1.000000] |" in text
        assert "- index_sign: -1" in text

    def test_empty_markdown(self):
        """Test an empty run is stated in Markdown."""
        assert "_No scenarios were run._" in emit([], "md")

    def test_unknown_format(self):
        """Test unknown formats are rejected."""
        with pytest.raises(ValueError):
            emit([], "yaml")

    def test_load_reports(self):
        """Test emitted JSON parses back into reports."""
        reports = load_reports(emit([sample_report()]))
        assert len(reports) == 1
        assert reports[0].scenario == "eta_closed_vs_zeta"
        assert reports[0].rows[0].passed
        assert reports[0].tolerance == TOL
