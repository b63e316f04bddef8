"""
Tests for the twisted circle Dirac operator and its spectral invariants.
"""

import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.cz import reduce
from src.dirac import (
    CircleDirac,
    GradedBundle,
    ahat_circle,
    eta_function,
    eta_xi_closed,
    eta_zeta_oracle,
    hurwitz_zeta,
    rho_dirac,
    rho_tilde,
    spectrum,
)
from src.errors import LabError
from src.forms import Form, PeriodicFamily
from src.fourier import TrigPoly, UnitFunction
from src.regulator import reg_unit

angles = st.floats(min_value=1e-3, max_value=2 * math.pi - 1e-3)


class TestCircleDirac:
    """Tests for the operator and its spectrum."""

    def test_spectrum_is_shifted_lattice(self):
        """Test the eigenvalues are 2πn + θ."""
        D = CircleDirac.from_theta(0.5)
        values = spectrum(D, 2)
        assert values == pytest.approx([-4 * math.pi + 0.5, -2 * math.pi + 0.5, 0.5, 2 * math.pi + 0.5, 4 * math.pi + 0.5])

    def test_trivial_holonomy_has_kernel(self):
        """Test v = 1 gives θ = 0 and a zero mode."""
        D = CircleDirac(1.0)
        assert D.has_kernel
        assert D.theta == 0.0

    def test_not_unitary(self):
        """Test |v| ≠ 1 is rejected."""
        with pytest.raises(LabError) as exc_info:
            CircleDirac(1.5)
        assert exc_info.value.code == "NotUnitary"

    def test_spectrum_window(self):
        """Test N must be positive."""
        with pytest.raises(LabError):
            spectrum(CircleDirac(1.0), 0)


class TestEta:
    """Tests for the closed form and the zeta oracle."""

    @pytest.mark.parametrize(
        "theta,eta,xi",
        [
            (math.pi / 2, 0.5, 0.25),
            (math.pi, 0.0, 0.0),
            (3 * math.pi / 2, -0.5, 0.75),
        ],
    )
    def test_closed_form(self, theta, eta, xi):
        """Test η = 1 − θ/π and ξ = η/2 mod ℤ."""
        value, reduced = eta_xi_closed(CircleDirac.from_theta(theta))
        assert value == pytest.approx(eta)
        assert reduced.distance(reduce(xi)) < 1e-12

    def test_kernel_contributes_half(self):
        """Test ξ = [1/2] for the trivial line."""
        eta, xi = eta_xi_closed(CircleDirac(1.0))
        assert eta == 0.0
        assert xi.rep == pytest.approx(0.5)

    @pytest.mark.parametrize("a", [0.1, 0.5, 0.9, 1.0])
    def test_hurwitz_at_zero(self, a):
        """Test ζ(0, a) = 1/2 − a."""
        assert hurwitz_zeta(0.0, a) == pytest.approx(0.5 - a, abs=1e-12)

    @pytest.mark.parametrize("s,a", [(2.0, 0.3), (1.5, 0.75), (-1.0, 0.4), (3.0, 1.0)])
    def test_hurwitz_against_mpmath(self, s, a):
        """Test the Euler–Maclaurin sum against mpmath.zeta."""
        assert hurwitz_zeta(s, a) == pytest.approx(float(mpmath.zeta(s, a)), rel=1e-10)

    @pytest.mark.parametrize("s,a", [(1.0, 0.5), (2.0, 0.0), (2.0, 1.5)])
    def test_hurwitz_domain(self, s, a):
        """Test the pole and shifts outside (0, 1] are rejected."""
        with pytest.raises(LabError) as exc_info:
            hurwitz_zeta(s, a)
        assert exc_info.value.code == "BadParams"

    def test_too_few_corrections(self):
        """Test fewer than ten Bernoulli terms are refused."""
        with pytest.raises(LabError):
            hurwitz_zeta(2.0, 0.5, corrections=5)

    def test_eta_function_against_mpmath(self):
        """Test η(s) at s = 2 against the two Hurwitz series."""
        D = CircleDirac.from_theta(1.0)
        a = 1.0 / (2 * math.pi)
        expected = (2 * math.pi) ** -2 * (mpmath.zeta(2, a) - mpmath.zeta(2, 1 - a))
        assert eta_function(D, 2.0) == pytest.approx(float(expected), rel=1e-10)

    @given(angles)
    @settings(max_examples=50, deadline=None)
    def test_oracle_matches_closed_form(self, theta):
        """Test the zeta-regularized η(0) equals 1 − θ/π."""
        D = CircleDirac.from_theta(theta)
        assert eta_zeta_oracle(D) == pytest.approx(eta_xi_closed(D)[0], abs=1e-9)

    @given(angles)
    @settings(max_examples=50, deadline=None)
    def test_conjugate_holonomy_cancels(self, theta):
        """Test ξ(v) + ξ(v̄) = [0]."""
        D = CircleDirac.from_theta(theta)
        conjugate = CircleDirac(D.holonomy.conjugate())
        total = eta_xi_closed(D)[1] + eta_xi_closed(conjugate)[1]
        assert total.distance(reduce(0)) < 1e-12

    def test_oracle_without_holonomy(self):
        """Test η(0) = 0 for the untwisted operator."""
        assert eta_zeta_oracle(CircleDirac(1.0)) == pytest.approx(0.0, abs=1e-12)


class TestRho:
    """Tests for the ℂ/ℤ-valued invariant of graded flat bundles."""

    def test_trivial_line(self):
        """Test ρ of the trivial line is [1/2]."""
        assert rho_dirac(GradedBundle.line(1.0)).rep == pytest.approx(0.5)

    def test_line_with_holonomy_i(self):
        """Test ρ of the line with holonomy i is [1/4]."""
        assert rho_dirac(GradedBundle.line(1j)).rep == pytest.approx(0.25)

    def test_graded_cancellation(self):
        """Test V ⊕ V with opposite gradings has ρ = 0."""
        v = cmath.exp(0.7j)
        bundle = GradedBundle.line(v, 1) + GradedBundle.line(v, -1)
        assert rho_dirac(bundle).distance(reduce(0.0)) < 1e-12

    def test_additivity(self):
        """Test ρ(V ⊕ W) = ρ(V) + ρ(W)."""
        v, w = GradedBundle.line(cmath.exp(0.3j)), GradedBundle.line(cmath.exp(2.1j), -1)
        assert rho_dirac(v + w).distance(rho_dirac(v) + rho_dirac(w)) < 1e-12

    def test_form_shift(self):
        """Test a closed family adds ∫ of its 1-form at p = 0."""
        gamma = PeriodicFamily.build(1, [(0, Form.dt(0).scale(0.25))])
        assert rho_tilde(gamma) == pytest.approx(0.25)
        assert rho_dirac(GradedBundle.line(1.0), gamma).rep == pytest.approx(0.75)

    def test_integral_form_is_invisible(self):
        """Test a family with integral periods does not change ρ mod ℤ."""
        gamma = PeriodicFamily.build(1, [(0, reg_unit(UnitFunction.character(3)))])
        bundle = GradedBundle.line(1j)
        assert rho_dirac(bundle, gamma).distance(rho_dirac(bundle)) < 1e-12

    def test_ahat_is_unit(self):
        """Test Â of the circle is 1 in degree 0."""
        assert ahat_circle().entry(0)[0].poly(()) == TrigPoly.constant(1)

    def test_rho_tilde_even_dimension(self):
        """Test ρ̃ is only defined in odd degree."""
        gamma = PeriodicFamily.build(1, [(0, Form.dt(0))])
        with pytest.raises(LabError) as exc_info:
            rho_tilde(gamma, 2)
        assert exc_info.value.code == "EvenDimension"

    def test_rho_tilde_not_closed(self):
        """Test non-closed families are rejected."""
        gamma = PeriodicFamily.build(1, [(0, Form.function(TrigPoly.character(1)))])
        with pytest.raises(LabError) as exc_info:
            rho_tilde(gamma)
        assert exc_info.value.code == "NotClosed"

    @pytest.mark.parametrize("summands", [(), ((1.0, 2),), ((2.0, 1),)])
    def test_invalid_bundle(self, summands):
        """Test empty, badly graded or non-unitary bundles are rejected."""
        with pytest.raises(LabError):
            GradedBundle(summands)
