"""
Tests for differential forms, periodic families and the periodic cohomology maps.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import LabError
from src.forms import (
    Form,
    HPClass,
    PeriodicFamily,
    Truncation,
    dd_differential,
    exterior_d,
    family_wedge,
    hp_representative,
    integrate_family,
    is_closed,
    psi_project,
    shift,
    torus_primitive,
    wedge,
)
from src.fourier import TWO_PI_I, TrigPoly

small_int = st.integers(min_value=-2, max_value=2)


def poly2(draw_dict):
    return TrigPoly.from_coeffs(draw_dict, 2)


polys2 = st.dictionaries(
    st.tuples(small_int, small_int), st.builds(complex, small_int, small_int), max_size=3
).map(poly2)


class TestForm:
    """Tests for single forms."""

    def test_dt_sign(self):
        """Test dt₁∧dt₀ = −dt₀∧dt₁."""
        assert Form.dt(1, 0, dim=2) == -Form.dt(0, 1, dim=2)

    def test_repeated_axis_is_zero(self):
        """Test dt₀∧dt₀ = 0."""
        assert Form.dt(0, 0, dim=2).is_zero

    def test_degree_above_dim(self):
        """Test a nonzero 2-form on the circle is rejected."""
        with pytest.raises(LabError) as exc_info:
            Form(1, 2, (((0, 1), TrigPoly.constant(1)),))
        assert exc_info.value.code in {"DegreeRange", "BadParams", "AxisRange"}

    def test_tau_is_factored_out(self):
        """Test d(e₁) is stored as τ·e₁ dt."""
        d = exterior_d(Form.function(TrigPoly.character(1)))
        assert d.tau_power == 1
        assert d.poly((0,)) == TrigPoly.character(1)

    def test_integrate_top_degree(self):
        """Test ∫ e₋₁ d(e₁) = 2πi."""
        form = wedge(
            Form.function(TrigPoly.character(-1)), exterior_d(Form.function(TrigPoly.character(1)))
        )
        assert form.integrate() == pytest.approx(TWO_PI_I)

    def test_integrate_lower_degree_is_zero(self):
        """Test functions integrate to zero as forms on T¹."""
        assert Form.function(TrigPoly.constant(3)).integrate() == 0

    def test_add_degree_mismatch(self):
        """Test adding forms of different degrees fails."""
        with pytest.raises(LabError) as exc_info:
            Form.function(TrigPoly.constant(1)) + Form.dt(0)
        assert exc_info.value.code == "DegreeMismatch"

    def test_add_mixed_tau_powers(self):
        """Test sums align τ-powers exactly."""
        a = Form.dt(0).with_tau(1)
        total = a + Form.dt(0)
        assert total.integrate() == pytest.approx(TWO_PI_I + 1)

    def test_wedge_graded_commutative(self):
        """Test dt₀∧dt₁ = −dt₁∧dt₀ through wedge."""
        a, b = Form.dt(0, dim=2), Form.dt(1, dim=2)
        assert wedge(a, b) == -wedge(b, a)

    @given(polys2, polys2)
    @settings(max_examples=40, deadline=None)
    def test_d_squared_is_zero(self, f, g):
        """Test d∘d = 0 on functions and 1-forms."""
        form = Form.function(f)
        assert exterior_d(exterior_d(form)).is_zero
        one = Form.from_poly(f, (0,)) + Form.from_poly(g, (1,))
        assert exterior_d(exterior_d(one)).is_zero

    @given(polys2, polys2)
    @settings(max_examples=40, deadline=None)
    def test_leibniz(self, f, g):
        """Test d(f·g) = df·g + f·dg."""
        a, b = Form.function(f), Form.function(g)
        assert exterior_d(wedge(a, b)) == wedge(exterior_d(a), b) + wedge(a, exterior_d(b))

    def test_primitive_of_exact_form(self):
        """Test torus_primitive inverts d away from constants."""
        target = exterior_d(Form.function(TrigPoly.from_coeffs({(1, 2): 1, (0, -1): 3j}, 2)))
        assert exterior_d(torus_primitive(target)) == target

    def test_primitive_rejects_constants(self):
        """Test constant forms have no primitive."""
        with pytest.raises(LabError) as exc_info:
            torus_primitive(Form.dt(0))
        assert exc_info.value.code == "NotExact"


class TestPeriodicFamily:
    """Tests for families p ↦ forms."""

    def test_build_merges_and_drops_zeros(self):
        """Test forms of equal (p, degree) are summed and zeros dropped."""
        fam = PeriodicFamily.build(1, [(1, Form.dt(0)), (1, -Form.dt(0)), (0, Form.dt(0))])
        assert [p for p, _ in fam.entries] == [0]

    def test_truncation_enforced(self):
        """Test ATMOST_P rejects a 1-form at p = 0."""
        with pytest.raises(LabError) as exc_info:
            PeriodicFamily.build(1, [(0, Form.dt(0))], Truncation.ATMOST_P)
        assert exc_info.value.code == "TruncationViolated"

    def test_add_requires_same_truncation(self):
        """Test mixing truncations fails."""
        a = PeriodicFamily.build(1, [(1, Form.dt(0))], Truncation.ATMOST_P)
        b = PeriodicFamily.build(1, [(1, Form.dt(0))], Truncation.ATLEAST_P)
        with pytest.raises(LabError) as exc_info:
            a + b
        assert exc_info.value.code == "TruncationMismatch"

    def test_shift_moves_entries(self):
        """Test ι₂ moves entry p to p + 1 and ι₋₂ undoes it."""
        fam = PeriodicFamily.build(1, [(0, Form.dt(0))])
        moved = shift(fam, 2)
        assert [p for p, _ in moved.entries] == [1]
        assert shift(moved, -2) == fam

    def test_shift_rejects_odd_and_truncated(self):
        """Test odd shifts and truncated families are rejected."""
        fam = PeriodicFamily.build(1, [(1, Form.dt(0))], Truncation.ATMOST_P)
        with pytest.raises(LabError) as exc_info:
            shift(fam, 3)
        assert exc_info.value.code == "OddShift"
        with pytest.raises(LabError) as exc_info:
            shift(fam, 2)
        assert exc_info.value.code == "TruncationMismatch"

    def test_psi_project_keeps_low_degrees(self):
        """Test psi keeps degree ≤ p in entry p."""
        fam = PeriodicFamily.build(
            1, [(0, Form.dt(0)), (0, Form.function(TrigPoly.constant(2))), (1, Form.dt(0))]
        )
        projected = psi_project(fam)
        assert projected.truncation is Truncation.ATMOST_P
        assert [(p, f.degree) for p, f in projected.forms()] == [(0, 0), (1, 1)]

    def test_dd_differential_respects_truncation(self):
        """Test d leaves the window of ATMOST_P families."""
        fam = PeriodicFamily.build(
            1, [(0, Form.function(TrigPoly.character(1)))], Truncation.ATMOST_P
        )
        assert dd_differential(fam).is_zero
        untruncated = PeriodicFamily.build(1, [(0, Form.function(TrigPoly.character(1)))])
        assert not dd_differential(untruncated).is_zero

    def test_family_wedge_adds_indices(self):
        """Test products land in entry p + q."""
        a = PeriodicFamily.build(2, [(1, Form.dt(0, dim=2))])
        b = PeriodicFamily.build(2, [(1, Form.dt(1, dim=2))])
        product = family_wedge(a, b)
        assert [p for p, _ in product.entries] == [2]
        assert integrate_family(product) == pytest.approx(1)


class TestHarmonicRepresentative:
    """Tests for hp_representative."""

    def test_keeps_constant_part(self):
        """Test the representative of (1 + d e₁) dt-type data is its constant part."""
        exact = exterior_d(Form.function(TrigPoly.character(1)))
        fam = PeriodicFamily.build(1, [(1, Form.dt(0) + exact)])
        rep = hp_representative(fam).rep
        assert rep == PeriodicFamily.build(1, [(1, Form.dt(0))])

    def test_is_idempotent(self):
        """Test the harmonic representative of a harmonic family is itself."""
        fam = PeriodicFamily.build(2, [(1, Form.dt(0, dim=2)), (2, Form.dt(0, 1, dim=2))])
        once = hp_representative(fam).rep
        assert hp_representative(once).rep == once

    def test_rejects_non_closed(self):
        """Test a non-closed family raises NotClosed."""
        fam = PeriodicFamily.build(1, [(0, Form.function(TrigPoly.character(1)))])
        assert not is_closed(fam)
        with pytest.raises(LabError) as exc_info:
            hp_representative(fam)
        assert exc_info.value.code == "NotClosed"

    def test_hpclass_validates(self):
        """Test HPClass refuses non-closed representatives."""
        fam = PeriodicFamily.build(1, [(0, Form.function(TrigPoly.character(2)))])
        with pytest.raises(LabError):
            HPClass(fam)
