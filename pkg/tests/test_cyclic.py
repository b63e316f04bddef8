"""
Tests for the cyclic chain complexes and the chain maps into forms.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.cyclic import (
    ChainLayout,
    CyclicChain,
    LambdaChain,
    boundary_b,
    canonical_rotation,
    connes_B,
    expand_word,
    hochschild_b,
    lambda_project,
    pi_d_iso,
    pi_dd,
    pi_minus,
    total_differential,
    word_form,
)
from src.errors import LabError
from src.forms import dd_differential, integrate_family
from src.fourier import TWO_PI_I, TrigPoly, scalar

letter = st.integers(min_value=-3, max_value=3).map(lambda n: (n,))
words = st.lists(letter, min_size=2, max_size=5).map(tuple)


def e(*n):
    return TrigPoly.character(n if len(n) > 1 else n[0])


class TestRawOperators:
    """Tests for b and B on character words."""

    def test_expand_word(self):
        """Test multilinear expansion of (e₁ + 2e₂) ⊗ e₃."""
        chain = expand_word([e(1) + e(2).scale(2), e(3)])
        assert chain == {((1,), (3,)): scalar(1), ((2,), (3,)): scalar(2)}

    def test_expand_word_dims(self):
        """Test letters on different tori are rejected."""
        with pytest.raises(LabError) as exc_info:
            expand_word([e(1), e(1, 0)])
        assert exc_info.value.code == "DimMismatch"

    def test_b_of_character_pair(self):
        """Test b(e₋ₘ ⊗ eₘ) = 0."""
        assert hochschild_b({((-2,), (2,)): scalar(1)}) == {}

    @given(words)
    @settings(max_examples=100, deadline=None)
    def test_b_squared_is_zero(self, word):
        """Test b∘b = 0 on raw words."""
        assert hochschild_b(hochschild_b({word: scalar(1)})) == {}

    @given(words)
    @settings(max_examples=50, deadline=None)
    def test_B_squared_is_zero(self, word):
        """Test B∘B = 0 in the normalized complex."""
        assert connes_B(connes_B({word: scalar(1)})) == {}

    def test_B_of_single_letter(self):
        """Test B(e₃) = 1 ⊗ e₃ and B(1) = 0."""
        assert connes_B({((3,),): scalar(1)}) == {((0,), (3,)): scalar(1)}
        assert connes_B({((0,),): scalar(1)}) == {}


class TestLambdaChain:
    """Tests for Connes' coinvariant complex."""

    def test_canonical_rotation_sign(self):
        """Test e₂⊗e₁ = −e₁⊗e₂ in C^λ₁."""
        assert canonical_rotation(((1,), (2,))) == (((1,), (2,)), 1)
        assert canonical_rotation(((2,), (1,))) == (((1,), (2,)), -1)

    def test_self_cancelling_word(self):
        """Test e₁⊗e₁ vanishes in C^λ₁."""
        assert canonical_rotation(((1,), (1,)))[1] == 0
        assert LambdaChain.build(1, 1, [(((1,), (1,)), 1)]).is_zero

    def test_antisymmetric_sum_cancels(self):
        """Test e₁⊗e₂ + e₂⊗e₁ = 0 in C^λ₁."""
        chain = LambdaChain.build(1, 1, [(((1,), (2,)), 1), (((2,), (1,)), 1)])
        assert chain.is_zero

    def test_wrong_length(self):
        """Test a word must have degree + 1 letters."""
        with pytest.raises(LabError) as exc_info:
            LambdaChain.build(2, 1, [(((1,), (2,)), 1)])
        assert exc_info.value.code == "BadParams"

    @given(st.lists(letter, min_size=4, max_size=4).map(tuple))
    @settings(max_examples=50, deadline=None)
    def test_boundary_squared(self, word):
        """Test b∘b = 0 on C^λ."""
        chain = LambdaChain.build(3, 1, [(word, 1)])
        assert boundary_b(boundary_b(chain)).is_zero

    def test_from_tensor(self):
        """Test building C^λ from TrigPoly letters."""
        chain = LambdaChain.from_tensor([([e(-1), e(1)], 1)])
        assert chain.degree == 1
        assert boundary_b(chain).is_zero


class TestCyclicChain:
    """Tests for the (b, B) bicomplex and its layouts."""

    def test_layout_enforced(self):
        """Test odd length gaps are rejected."""
        with pytest.raises(LabError) as exc_info:
            CyclicChain.from_tensor(1, [([e(1)], 1)])
        assert exc_info.value.code == "BadChainLayout"

    def test_negative_layout_rejects_short_words(self):
        """Test the negative layout holds words of length ≥ n + 1."""
        with pytest.raises(LabError) as exc_info:
            CyclicChain.from_tensor(2, [([e(1)], 1)], ChainLayout.NEGATIVE)
        assert exc_info.value.code == "BadChainLayout"

    def test_components(self):
        """Test words are indexed by their component."""
        chain = CyclicChain.from_tensor(2, [([e(1), e(2), e(3)], 1), ([e(4)], 1)])
        assert set(chain.component(1)) == {((1,), (2,), (3,))}
        assert set(chain.component(0)) == {((4,),)}

    def test_json_restores_chain(self):
        """Test the JSON form rebuilds the chain."""
        chain = CyclicChain.from_tensor(2, [([e(1, 0), e(0, 1), e(-1, -1)], 0.5), ([e(2, 0)], 1j)])
        assert CyclicChain.from_json(chain.to_json()) == chain

    def test_json_checks_component(self):
        """Test an inconsistent component index is rejected."""
        data = CyclicChain.from_tensor(2, [([e(4)], 1)]).to_json()
        data["terms"][0]["k"] = 1
        with pytest.raises(LabError) as exc_info:
            CyclicChain.from_json(data)
        assert exc_info.value.code == "BadChainLayout"

    def test_total_differential_degree(self):
        """Test b + B lowers the degree by one."""
        chain = CyclicChain.from_tensor(2, [([e(4)], 1)])
        image = total_differential(chain)
        assert image.degree == 1
        assert image.raw() == {((0,), (4,)): scalar(1)}

    def test_lambda_project(self):
        """Test the top component passes to C^λ."""
        chain = CyclicChain.from_tensor(2, [([e(2), e(1), e(3)], 1), ([e(4)], 1)])
        lam = lambda_project(chain)
        assert lam.degree == 2
        assert len(lam.terms) == 1


class TestChainMaps:
    """Tests for π, π⁻ and the periodic class map."""

    def test_word_form_weight(self):
        """Test e₋₁ de₁ integrates to 2πi."""
        form = word_form(((-1,), (1,)), scalar(1), 1)
        assert form.integrate() == pytest.approx(TWO_PI_I)

    @pytest.mark.parametrize(
        "words",
        [
            [([e(1, 0), e(0, 1), e(-1, 2)], 1), ([e(2, 1)], 3)],
            [([e(1, 1), e(0, -1), e(2, 0)], 0.5j), ([e(0, 3)], -1)],
        ],
    )
    def test_pi_is_a_chain_map(self, words):
        """Test π(b + B)c = dπc on T²."""
        c = CyclicChain.from_tensor(2, words)
        assert (pi_dd(total_differential(c)) - dd_differential(pi_dd(c))).is_zero

    def test_pi_minus_is_a_chain_map(self):
        """Test π⁻(b + B)c = dπ⁻c in the negative layout."""
        c = CyclicChain.from_tensor(
            1,
            [([e(1, 0), e(0, 2)], 1), ([e(1, 1), e(0, 1), e(-1, 0), e(2, 0)], 2)],
            ChainLayout.NEGATIVE,
        )
        assert (pi_minus(total_differential(c)) - dd_differential(pi_minus(c))).is_zero

    def test_pi_requires_cyclic_layout(self):
        """Test π refuses the negative layout."""
        c = CyclicChain.from_tensor(1, [([e(1), e(2)], 1)], ChainLayout.NEGATIVE)
        with pytest.raises(LabError) as exc_info:
            pi_dd(c)
        assert exc_info.value.code == "BadChainLayout"

    def test_pi_d_iso_of_character_pair(self):
        """Test the class of e₋₁⊗e₁ on the circle integrates to 2πi."""
        c = CyclicChain.from_tensor(1, [([e(-1), e(1)], 1)])
        assert integrate_family(pi_d_iso(c, 1).rep) == pytest.approx(TWO_PI_I)

    def test_pi_d_iso_needs_a_cycle(self):
        """Test non-cycles are rejected."""
        c = CyclicChain.from_tensor(2, [([e(1), e(2), e(3)], 1)])
        with pytest.raises(LabError) as exc_info:
            pi_d_iso(c, 1)
        assert exc_info.value.code == "NotACycle"

    def test_pi_d_iso_dimension(self):
        """Test the target dimension must match the torus."""
        c = CyclicChain.from_tensor(1, [([e(-1), e(1)], 1)])
        with pytest.raises(LabError) as exc_info:
            pi_d_iso(c, 2)
        assert exc_info.value.code == "DimMismatch"
