"""
Chain-level cyclic homology of trigonometric polynomial algebras.

Tensor words f₀⊗…⊗f_n are expanded multilinearly into words of characters
e_{n₀}⊗…⊗e_{n_m}, stored as tuples of Fourier indices with exact coefficients.
The algebra is commutative, so products of letters add indices.

Two chain models are provided:

* :class:`LambdaChain`: Connes' coinvariant complex C^λ_n, each word kept in a
  canonical rotation with the cyclic sign folded into its coefficient.
* :class:`CyclicChain`: the (b, B) bicomplex in total degree n, either in the
  cyclic layout (words of length n+1−2j) or in the negative layout (words of
  length n+1+2k).

The chain maps π⁻ and π send both into p-indexed families of forms.
"""

import itertools
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from sympy.polys.rings import PolyElement

from src.errors import LabError
from src.forms import (
    CLOSED_TOL,
    Form,
    HPClass,
    PeriodicFamily,
    Truncation,
    closedness_residual,
    exterior_d,
    hp_representative,
    shift,
    wedge,
)
from src.fourier import Index, TauRing, TrigPoly, scalar, to_complex

logger = logging.getLogger(__name__)

Word = tuple[Index, ...]
RawChain = dict[Word, PolyElement]


# =============================================================================
# Raw words
# =============================================================================


def _add(chain: RawChain, word: Word, coeff: PolyElement) -> None:
    total = chain.get(word, TauRing.zero) + coeff
    if total:
        chain[word] = total
    else:
        chain.pop(word, None)


def _letter_sum(a: Index, b: Index) -> Index:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def expand_word(polys: Sequence[TrigPoly], coeff: Any = 1) -> RawChain:
    """Multilinear expansion of f₀⊗…⊗f_n into character words."""
    if not polys:
        raise LabError("BadParams", "a tensor word needs at least one letter")
    dims = {f.dim for f in polys}
    if len(dims) != 1:
        raise LabError("DimMismatch", f"letters live on tori of dims {sorted(dims)}")
    chain: RawChain = {}
    base = scalar(coeff)
    for letters in itertools.product(*(f.terms for f in polys)):
        value = base
        for _, c in letters:
            value = value * c
        _add(chain, tuple(n for n, _ in letters), value)
    return chain


def hochschild_b(chain: Mapping[Word, PolyElement]) -> RawChain:
    """
    Hochschild boundary on raw words.

    b(a₀⊗…⊗a_n) = Σ_{i<n} (−1)^i a₀⊗…⊗a_i a_{i+1}⊗…⊗a_n + (−1)^n a_n a₀⊗a₁⊗…⊗a_{n−1}
    """
    image: RawChain = {}
    for word, coeff in chain.items():
        n = len(word) - 1
        if n < 1:
            continue
        for i in range(n):
            merged = word[:i] + (_letter_sum(word[i], word[i + 1]),) + word[i + 2 :]
            _add(image, merged, coeff if i % 2 == 0 else -coeff)
        wrapped = (_letter_sum(word[n], word[0]),) + word[1:n]
        _add(image, wrapped, coeff if n % 2 == 0 else -coeff)
    return image


def connes_B(chain: Mapping[Word, PolyElement]) -> RawChain:
    """
    Normalized Connes operator B(a₀⊗…⊗a_n) = Σ_i (−1)^{ni} 1⊗a_i⊗…⊗a_n⊗a₀⊗…⊗a_{i−1}.

    Words with a constant letter past position 0 vanish in the normalized complex.
    """
    image: RawChain = {}
    for word, coeff in chain.items():
        n = len(word) - 1
        zero = (0,) * len(word[0])
        for i in range(n + 1):
            rotated = (zero,) + word[i:] + word[:i]
            if any(not any(letter) for letter in rotated[1:]):
                continue
            _add(image, rotated, coeff if (n * i) % 2 == 0 else -coeff)
    return image


def _check_dim(words: Iterable[Word], dim: int) -> None:
    for word in words:
        for letter in word:
            if len(letter) != dim:
                raise LabError("DimMismatch", f"letter {letter} in a chain on T^{dim}")


def _coeff_json(c: PolyElement) -> dict[str, float]:
    value = to_complex(c)
    return {"re": value.real, "im": value.imag}


def _word_json(word: Word) -> list[dict[str, Any]]:
    return [TrigPoly.character(letter).to_json() for letter in word]


# =============================================================================
# Connes' complex C^λ
# =============================================================================


def canonical_rotation(word: Word) -> tuple[Word, int]:
    """
    Representative of a word under the signed cyclic action t = (−1)^n·rotation.

    Returns:
        Tuple (minimal rotation, sign); sign 0 when the word's class vanishes
    """
    n = len(word) - 1
    best: Word | None = None
    signs: set[int] = set()
    for r in range(n + 1):
        rotated = word[len(word) - r :] + word[: len(word) - r]
        sign = -1 if (n * r) % 2 else 1
        if best is None or rotated < best:
            best, signs = rotated, {sign}
        elif rotated == best:
            signs.add(sign)
    if len(signs) > 1:
        return best, 0
    return best, signs.pop()


@dataclass(frozen=True)
class LambdaChain:
    """Element of C^λ_n with words in canonical rotation."""

    degree: int
    dim: int
    terms: tuple[tuple[Word, PolyElement], ...] = ()

    def __post_init__(self):
        if self.degree < 0:
            raise LabError("BadParams", f"negative chain degree {self.degree}")
        for word, _ in self.terms:
            if len(word) != self.degree + 1:
                raise LabError("BadParams", f"word of length {len(word)} in degree {self.degree}")
        _check_dim((word for word, _ in self.terms), self.dim)

    @classmethod
    def build(
        cls, degree: int, dim: int, chain: Mapping[Word, PolyElement] | Iterable[tuple[Word, Any]]
    ) -> "LambdaChain":
        """Canonicalize raw words into C^λ."""
        items = chain.items() if isinstance(chain, Mapping) else chain
        collected: RawChain = {}
        for word, coeff in items:
            word = tuple(tuple(int(x) for x in letter) for letter in word)
            if len(word) != degree + 1:
                raise LabError("BadParams", f"word of length {len(word)} in degree {degree}")
            rep, sign = canonical_rotation(word)
            if sign:
                _add(collected, rep, scalar(coeff) * sign)
        return cls(degree, dim, tuple(sorted(collected.items())))

    @classmethod
    def from_tensor(
        cls, words: Iterable[tuple[Sequence[TrigPoly], Any]], dim: int | None = None
    ) -> "LambdaChain":
        """Build from (list of TrigPoly letters, coefficient) pairs of equal length."""
        words = list(words)
        if not words:
            return cls(0, dim or 1)
        degree = len(words[0][0]) - 1
        raw: RawChain = {}
        for polys, coeff in words:
            if len(polys) != degree + 1:
                raise LabError("BadParams", "tensor words of different lengths")
            for word, c in expand_word(polys, coeff).items():
                _add(raw, word, c)
        return cls.build(degree, dim or words[0][0][0].dim, raw)

    @classmethod
    def zero(cls, degree: int, dim: int = 1) -> "LambdaChain":
        return cls(degree, dim)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def raw(self) -> RawChain:
        return dict(self.terms)

    def _check(self, other: "LambdaChain") -> None:
        if (other.degree, other.dim) != (self.degree, self.dim):
            raise LabError(
                "DimMismatch", f"C^λ_{self.degree}(T^{self.dim}) vs C^λ_{other.degree}(T^{other.dim})"
            )

    def __add__(self, other: "LambdaChain") -> "LambdaChain":
        self._check(other)
        merged = self.raw()
        for word, c in other.terms:
            _add(merged, word, c)
        return LambdaChain(self.degree, self.dim, tuple(sorted(merged.items())))

    def __neg__(self) -> "LambdaChain":
        return LambdaChain(self.degree, self.dim, tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other: "LambdaChain") -> "LambdaChain":
        return self + (-other)

    def scale(self, c: Any) -> "LambdaChain":
        factor = scalar(c)
        return LambdaChain.build(self.degree, self.dim, [(w, v * factor) for w, v in self.terms])

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.degree,
            "terms": [{"word": _word_json(w), "coeff": _coeff_json(c)} for w, c in self.terms],
        }


def boundary_b(c: LambdaChain) -> LambdaChain:
    """Boundary of C^λ, computed on representatives and re-canonicalized."""
    if c.degree == 0:
        return LambdaChain.zero(0, c.dim)
    return LambdaChain.build(c.degree - 1, c.dim, hochschild_b(c.raw()))


# =============================================================================
# The cyclic bicomplex
# =============================================================================


class ChainLayout(str, Enum):
    """Which part of the (b, B) bicomplex a chain lives in."""

    CYCLIC = "cyclic"  # lengths n+1, n−1, …
    NEGATIVE = "negative"  # lengths n+1, n+3, …


def _layout_ok(layout: ChainLayout, degree: int, length: int) -> bool:
    gap = length - (degree + 1)
    if gap % 2 or length < 1:
        return False
    return gap <= 0 if layout is ChainLayout.CYCLIC else gap >= 0


@dataclass(frozen=True)
class CyclicChain:
    """
    Chain of total degree n in the (b, B) bicomplex.

    In the cyclic layout the component k holds words of length 2k+1 (n even) or
    2k+2 (n odd); in the negative layout it holds words of length n+1+2k.
    """

    degree: int
    dim: int
    terms: tuple[tuple[Word, PolyElement], ...] = ()
    layout: ChainLayout = ChainLayout.CYCLIC

    def __post_init__(self):
        object.__setattr__(self, "layout", ChainLayout(self.layout))
        if self.degree < 0:
            raise LabError("BadParams", f"negative chain degree {self.degree}")
        for word, _ in self.terms:
            if not _layout_ok(self.layout, self.degree, len(word)):
                raise LabError(
                    "BadChainLayout",
                    f"word of length {len(word)} in {self.layout.value} degree {self.degree}",
                )
        _check_dim((word for word, _ in self.terms), self.dim)

    @classmethod
    def build(
        cls,
        degree: int,
        dim: int,
        chain: Mapping[Word, PolyElement],
        layout: ChainLayout = ChainLayout.CYCLIC,
    ) -> "CyclicChain":
        terms = tuple(sorted((w, c) for w, c in chain.items() if c))
        return cls(degree, dim, terms, layout)

    @classmethod
    def from_tensor(
        cls,
        degree: int,
        words: Iterable[tuple[Sequence[TrigPoly], Any]],
        layout: ChainLayout = ChainLayout.CYCLIC,
        dim: int | None = None,
    ) -> "CyclicChain":
        raw: RawChain = {}
        for polys, coeff in words:
            dim = dim or polys[0].dim
            for word, c in expand_word(polys, coeff).items():
                _add(raw, word, c)
        return cls.build(degree, dim or 1, raw, layout)

    def component_index(self, word: Word) -> int:
        """The index k of the component a word of this chain sits in."""
        if self.layout is ChainLayout.CYCLIC:
            return (len(word) - 1) // 2
        return (len(word) - self.degree - 1) // 2

    def component(self, k: int) -> RawChain:
        return {w: c for w, c in self.terms if self.component_index(w) == k}

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def raw(self) -> RawChain:
        return dict(self.terms)

    def __add__(self, other: "CyclicChain") -> "CyclicChain":
        if (other.degree, other.dim, other.layout) != (self.degree, self.dim, self.layout):
            raise LabError("BadChainLayout", "cannot add chains of different shape")
        merged = self.raw()
        for word, c in other.terms:
            _add(merged, word, c)
        return CyclicChain.build(self.degree, self.dim, merged, self.layout)

    def scale(self, c: Any) -> "CyclicChain":
        factor = scalar(c)
        return CyclicChain.build(
            self.degree, self.dim, {w: v * factor for w, v in self.terms}, self.layout
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.degree,
            "layout": self.layout.value,
            "terms": [
                {"k": self.component_index(w), "word": _word_json(w), "coeff": _coeff_json(c)}
                for w, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "CyclicChain":
        degree = int(data["n"])
        layout = ChainLayout(data.get("layout", ChainLayout.CYCLIC.value))
        words = []
        for item in data.get("terms", []):
            polys = [TrigPoly.from_json(p) for p in item["word"]]
            coeff = item.get("coeff", {"re": 1.0})
            words.append((polys, complex(coeff.get("re", 0.0), coeff.get("im", 0.0))))
        chain = cls.from_tensor(degree, words, layout)
        for item in data.get("terms", []):
            if "k" in item:
                length = len(item["word"])
                expected = (
                    (length - 1) // 2
                    if layout is ChainLayout.CYCLIC
                    else (length - degree - 1) // 2
                )
                if int(item["k"]) != expected:
                    raise LabError("BadChainLayout", f"k={item['k']} for a word of length {length}")
        return chain


def total_differential(c: CyclicChain) -> CyclicChain:
    """
    b + B on the bicomplex, landing in total degree n − 1.

    In the cyclic layout B only acts on components below the top row, so that
    its image still fits into degree n − 1.
    """
    if c.degree == 0:
        raise LabError("BadParams", "the total differential starts in degree 1")
    image = hochschild_b(c.raw())
    for word, coeff in connes_B(c.raw()).items():
        if c.layout is ChainLayout.CYCLIC and len(word) > c.degree:
            continue
        _add(image, word, coeff)
    return CyclicChain.build(c.degree - 1, c.dim, image, c.layout)


def lambda_project(c: CyclicChain) -> LambdaChain:
    """Keep the word component of length n + 1 and pass to coinvariants."""
    top = {w: v for w, v in c.terms if len(w) == c.degree + 1}
    return LambdaChain.build(c.degree, c.dim, top)


# =============================================================================
# Maps to forms
# =============================================================================


def word_form(word: Word, coeff: PolyElement, dim: int) -> Form:
    """(1/m!)·c·e_{n₀} de_{n₁}∧…∧de_{n_m}."""
    m = len(word) - 1
    weight = coeff * scalar(Fraction(1, math.factorial(m)))
    form = Form.function(TrigPoly.character(word[0]).scale(weight))
    for letter in word[1:]:
        if form.is_zero:
            return Form.zero(dim, m)
        form = wedge(form, exterior_d(Form.function(TrigPoly.character(letter))))
    return form


def _pi(c: CyclicChain, keep, truncation: Truncation) -> PeriodicFamily:
    contributions = []
    for word, coeff in c.terms:
        if not keep(word):
            continue
        m = len(word) - 1
        form = word_form(word, coeff, c.dim)
        if form.is_zero:
            continue
        contributions.append(((c.degree + m) // 2, form))
    return PeriodicFamily.build(c.dim, contributions, truncation)


def pi_minus(c: CyclicChain) -> PeriodicFamily:
    """
    π⁻ into DD⁻: a word with m+1 letters goes to entry p = (n+m)/2 as a degree-m form.

    In the cyclic layout only the top row meets DD⁻; the negative layout maps
    every component.
    """
    if c.layout is ChainLayout.CYCLIC:
        return _pi(c, lambda w: len(w) == c.degree + 1, Truncation.ATLEAST_P)
    return _pi(c, lambda w: True, Truncation.ATLEAST_P)


def pi_dd(c: CyclicChain) -> PeriodicFamily:
    """π into DD: Σ_k (b^{p}/m!) f₀ df₁∧…∧df_m with p = (n+m)/2."""
    if c.layout is not ChainLayout.CYCLIC:
        raise LabError("BadChainLayout", "π is defined on the cyclic layout")
    return _pi(c, lambda w: True, Truncation.ATMOST_P)


def pi_d_iso(c: CyclicChain, d: int) -> HPClass:
    """
    Periodic class of a cyclic cycle on T^d: π, harmonic lift, then ι_{d−1}.

    Raises:
        LabError: ``NotACycle``, ``DimMismatch`` or ``NotClosed``
    """
    if not boundary_b(lambda_project(c)).is_zero:
        raise LabError("NotACycle", "λ-projection is not a b-cycle")
    if c.dim != d:
        raise LabError("DimMismatch", f"chain on T^{c.dim}, target dimension {d}")
    family = pi_dd(c)
    residual = closedness_residual(family)
    if residual > CLOSED_TOL:
        raise LabError("NotClosed", f"π image has d-residual {residual:.3e}")
    harmonic = hp_representative(family)
    shifted = HPClass(shift(harmonic.rep, d - 1))
    logger.debug("pi_d_iso: %d terms -> %d entries", len(c.terms), len(shifted.rep.entries))
    return shifted
