"""
Tests for Čech–Deligne classes on arc covers of the circle.
"""

import math

import numpy as np
import pytest

from src.cz import reduce
from src.deligne import (
    ArcCover,
    DeligneH1,
    LocalLog,
    antisymmetry_defect,
    cup,
    evaluate,
    pairing_cech,
    pairing_closed_form,
    random_cover,
    unit_to_deligne,
)
from src.errors import LabError
from src.fourier import TrigPoly, UnitFunction

PAIRS = [
    ((0, {1: 0.3}), (0, {-1: 0.3})),
    ((1, {}), (1, {})),
    ((1, {2: 0.2}), (-2, {-1: 0.1, 0: 0.05})),
    ((0, {0: 0.4j, 1: 0.1}), (3, {1: -0.2})),
    ((2, {-1: 0.15}), (0, {0: 0.3, 2: 0.1j})),
]


def unit(spec) -> UnitFunction:
    winding, coeffs = spec
    return UnitFunction((winding,), TrigPoly.from_coeffs(coeffs, 1))


# =============================================================================
# Covers
# =============================================================================


class TestArcCover:
    """Tests for arc covers."""

    @pytest.mark.parametrize(
        "cuts", [(0.0, 0.5), (0.0, 0.5, 0.5), (0.3, 0.1, 0.6), (0.0, 0.5, 1.0)]
    )
    def test_invalid(self, cuts):
        """Test too few, repeated, unsorted or out-of-range cuts are rejected."""
        with pytest.raises(LabError) as exc_info:
            ArcCover(cuts)
        assert exc_info.value.code == "BadCover"

    def test_uniform_and_refine(self):
        """Test refinement splits every arc."""
        cover = ArcCover.uniform(4)
        assert cover.cuts == (0.0, 0.25, 0.5, 0.75)
        assert cover.refine().m == 8
        assert cover.endpoint(3) == 1.0
        assert cover.epsilon == pytest.approx(0.0625)

    def test_json_checks_count(self):
        """Test an inconsistent arc count is rejected."""
        with pytest.raises(LabError) as exc_info:
            ArcCover.from_json({"m": 5, "cuts": [0.0, 0.3, 0.6]})
        assert exc_info.value.code == "BadCover"

    def test_random_cover(self, rng):
        """Test random covers are valid with the requested size."""
        cover = random_cover(rng, 6)
        assert cover.m == 6


# =============================================================================
# Cocycles
# =============================================================================


class TestDeligneCocycles:
    """Tests for degree-1 and degree-2 cocycles."""

    def test_unit_class_transitions(self):
        """Test principal branches spread the winding over interior overlaps."""
        cover = ArcCover.uniform(5)
        x = unit_to_deligne(unit((3, {1: 0.2})), cover)
        assert x.winding == 3
        assert any(n != 0 for n in x.transitions[1:])
        assert all(n in (0, 1) for n in x.transitions)
        assert x.residual() < 1e-12

    @pytest.mark.parametrize("spec", [PAIRS[2][0], PAIRS[3][1], (-1, {}), (0, {1: 0.3})])
    def test_principal_branch_per_arc(self, spec):
        """Test every arc's log has real part in (−1/2, 1/2] at the arc midpoint."""
        cover = ArcCover.uniform(6, start=0.05)
        x = unit_to_deligne(unit(spec), cover)
        for i, log in enumerate(x.logs):
            mid = (cover.cuts[i] + cover.endpoint(i)) / 2
            value = log(np.array([mid]))[0]
            assert -0.5 < value.real <= 0.5 + 1e-12
            assert isinstance(log.offset, int)
        assert x.winding == spec[0]

    def test_winding_one_jumps_inside(self):
        """Test e^{2πit} on four arcs jumps at t = 1/2, not at t₀."""
        x = unit_to_deligne(UnitFunction.character(1), ArcCover.uniform(4))
        assert x.transitions == (0, 0, 1, 0)

    def test_small_exponential_has_no_transitions(self):
        """Test exp(g) with |Im g| < π keeps one branch on every arc."""
        x = unit_to_deligne(unit((0, {1: 0.3, -2: 0.2j})), random_cover(np.random.default_rng(5), 7))
        assert x.transitions == (0,) * 7

    def test_pairing_ignores_branch_offsets(self):
        """Test shifting the local logs by integers leaves the pairing unchanged mod ℤ."""
        cover = ArcCover.uniform(4, start=0.1)
        u1, u2 = unit(PAIRS[2][0]), unit(PAIRS[2][1])
        x, y = unit_to_deligne(u1, cover), unit_to_deligne(u2, cover)
        shifts = (2, -1, 0, 5)
        logs = tuple(
            LocalLog(log.winding, log.logpart, log.offset + k)
            for log, k in zip(x.logs, shifts, strict=True)
        )
        transitions = tuple(n + shifts[i - 1] - shifts[i] for i, n in enumerate(x.transitions))
        shifted = DeligneH1(cover, logs, transitions)
        assert shifted.transitions != x.transitions
        assert evaluate(cup(shifted, y)).distance(evaluate(cup(x, y))) < 1e-9
        assert evaluate(cup(shifted, y)).distance(pairing_closed_form(u1, u2)) < 1e-9

    def test_wrong_transition(self):
        """Test a transition that does not match the logs is rejected."""
        cover = ArcCover.uniform(4)
        log = LocalLog(1, TrigPoly.zero(1))
        with pytest.raises(LabError) as exc_info:
            DeligneH1(cover, (log,) * 4, (0, 0, 0, 0))
        assert exc_info.value.code == "NotACocycle"

    def test_cover_mismatch(self):
        """Test logs must match the number of arcs."""
        log = LocalLog(0, TrigPoly.zero(1))
        with pytest.raises(LabError) as exc_info:
            DeligneH1(ArcCover.uniform(4), (log,) * 3, (0, 0, 0))
        assert exc_info.value.code == "CoverMismatch"

    def test_cup_needs_common_cover(self):
        """Test classes on different covers cannot be multiplied."""
        u = unit((1, {}))
        with pytest.raises(LabError) as exc_info:
            cup(unit_to_deligne(u, ArcCover.uniform(3)), unit_to_deligne(u, ArcCover.uniform(4)))
        assert exc_info.value.code == "CoverMismatch"

    def test_cup_is_a_cocycle(self):
        """Test the degree-2 overlap relation holds."""
        cover = ArcCover.uniform(6, start=0.1)
        product = cup(unit_to_deligne(unit(PAIRS[2][0]), cover), unit_to_deligne(unit(PAIRS[2][1]), cover))
        assert product.residual() < 1e-9


# =============================================================================
# Pairing
# =============================================================================


class TestPairing:
    """Tests for ⟨u₁ ∪ u₂, [S¹]⟩."""

    def test_small_units(self, small_units):
        """Test the pairing of exp(0.3e₁) and exp(0.3e₋₁) is −0.09/(2πi)."""
        u1, u2 = small_units
        assert pairing_closed_form(u1, u2).rep == pytest.approx(0.09j / (2 * math.pi))

    def test_characters(self):
        """Test ⟨e₁ ∪ e₁⟩ = [1/2]."""
        assert pairing_closed_form(UnitFunction.character(1), UnitFunction.character(1)).rep == pytest.approx(0.5)

    @pytest.mark.parametrize("spec1,spec2", PAIRS)
    def test_cech_matches_closed_form(self, spec1, spec2):
        """Test the Čech evaluation against the closed form."""
        u1, u2 = unit(spec1), unit(spec2)
        assert pairing_cech(u1, u2).distance(pairing_closed_form(u1, u2)) < 1e-9

    @pytest.mark.parametrize("spec1,spec2", PAIRS)
    def test_independent_of_cover(self, rng, spec1, spec2):
        """Test random covers and refinements give the same value."""
        u1, u2 = unit(spec1), unit(spec2)
        cover = random_cover(rng, 5)
        value = pairing_cech(u1, u2, cover)
        assert value.distance(pairing_cech(u1, u2, cover.refine())) < 1e-9
        assert value.distance(pairing_cech(u1, u2)) < 1e-9

    @pytest.mark.parametrize("spec1,spec2", PAIRS)
    def test_antisymmetry(self, spec1, spec2):
        """Test ⟨u₁∪u₂⟩ + ⟨u₂∪u₁⟩ = ab ≡ 0 mod ℤ."""
        u1, u2 = unit(spec1), unit(spec2)
        total = pairing_closed_form(u1, u2) + pairing_closed_form(u2, u1)
        assert antisymmetry_defect(u1, u2) == spec1[0] * spec2[0]
        assert antisymmetry_defect(u2, u1) == spec1[0] * spec2[0]
        assert total.distance(reduce(0.0)) < 1e-9

    @pytest.mark.parametrize("spec1,spec2", PAIRS)
    def test_cech_antisymmetry(self, rng, spec1, spec2):
        """Test both Čech cup orders sum to an integer class on a random cover."""
        u1, u2 = unit(spec1), unit(spec2)
        cover = random_cover(rng, 6)
        total = pairing_cech(u1, u2, cover) + pairing_cech(u2, u1, cover)
        assert total.distance(reduce(antisymmetry_defect(u1, u2))) < 1e-9

    def test_bilinear_in_first_argument(self):
        """Test ⟨(u·v) ∪ w⟩ = ⟨u ∪ w⟩ + ⟨v ∪ w⟩."""
        u, v, w = unit(PAIRS[2][0]), unit(PAIRS[3][0]), unit(PAIRS[4][1])
        lhs = pairing_cech(u * v, w)
        assert lhs.distance(pairing_cech(u, w) + pairing_cech(v, w)) < 1e-9

    def test_pairing_on_torus(self):
        """Test units on T² are rejected."""
        with pytest.raises(LabError) as exc_info:
            pairing_closed_form(UnitFunction.character((1, 0)), UnitFunction.character((0, 1)))
        assert exc_info.value.code == "DimMismatch"
