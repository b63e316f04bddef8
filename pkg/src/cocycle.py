"""
The operator side of the multiplicative character on the circle.

``b_dirac`` splits a multiplication operator into blocks along the Hardy
projection; ``phi_d_eval`` pairs block operators with the cyclic cocycle φ_d and
``cochain_a`` evaluates the Fredholm-module cochain Tr(F[F,f₀]⋯[F,f_d]) on
cyclic words. ``compare_ab`` measures the constant relating that cochain to the
form-side cochain ``cochain_b``.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel

from src.cyclic import LambdaChain, boundary_b, word_form
from src.errors import LabError
from src.fourier import TWO_PI_I, TrigPoly, to_complex
from src.operators import (
    TruncOp,
    WindowSpec,
    hardy_projection,
    mult_op,
    schatten_norm,
    trace_guarded,
)

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10


@dataclass(frozen=True)
class CocycleConstants:
    """Normalizing constants of φ_d and of the Fredholm-module cochain."""

    d: int
    c_phi: complex
    c_a: complex

    @classmethod
    def for_degree(cls, d: int) -> "CocycleConstants":
        if d < 1 or d % 2 == 0:
            raise LabError("EvenDimension", f"cocycle constants need odd d, got {d}")
        half = (d - 1) // 2
        denominator = TWO_PI_I**half * math.factorial(half)
        c_phi = (-1) ** half * math.factorial(d) / denominator
        c_a = -(2 ** (d + 1)) * math.factorial(d) / denominator
        return cls(d, complex(c_phi), complex(c_a))


# =============================================================================
# Block operators
# =============================================================================


@dataclass(frozen=True, eq=False)
class BlockOp:
    """
    2×2 block decomposition of an operator along P⁺ ⊕ P⁻.

    Rows and columns of a₁₁ are the modes n ≥ 1, those of a₂₂ the modes n ≤ 0.
    """

    window: WindowSpec
    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray
    schatten_index: float = 2.0

    def __post_init__(self):
        plus = int(np.count_nonzero(self.window.indices >= 1))
        minus = self.window.size - plus
        expected = {
            "a11": (plus, plus),
            "a12": (plus, minus),
            "a21": (minus, plus),
            "a22": (minus, minus),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise LabError("WindowMismatch", f"{name} has shape {getattr(self, name).shape}")

    def _embed(self, **blocks: np.ndarray) -> np.ndarray:
        positive = self.window.indices >= 1
        layout = {
            "a11": (positive, positive),
            "a12": (positive, ~positive),
            "a21": (~positive, positive),
            "a22": (~positive, ~positive),
        }
        full = np.zeros((self.window.size, self.window.size), dtype=complex)
        for name, block in blocks.items():
            rows, cols = layout[name]
            full[np.ix_(rows, cols)] = block
        return full

    def full(self) -> TruncOp:
        return TruncOp(
            self.window, self._embed(a11=self.a11, a12=self.a12, a21=self.a21, a22=self.a22)
        )

    def offdiag(self) -> TruncOp:
        """[[0, a₁₂], [a₂₁, 0]] back on the full window."""
        return TruncOp(self.window, self._embed(a12=self.a12, a21=self.a21))

    @property
    def offdiag_norms(self) -> tuple[float, float]:
        """Schatten norms of a₁₂ and a₂₁ (inner window) at the recorded index."""
        return (
            schatten_norm(TruncOp(self.window, self._embed(a12=self.a12)), self.schatten_index),
            schatten_norm(TruncOp(self.window, self._embed(a21=self.a21)), self.schatten_index),
        )

    def __add__(self, other: "BlockOp") -> "BlockOp":
        if other.window != self.window:
            raise LabError("WindowMismatch", f"{self.window} vs {other.window}")
        return BlockOp(
            self.window,
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
            self.schatten_index,
        )


def b_dirac(f: TrigPoly, w: WindowSpec, d: int = 1) -> BlockOp:
    """
    f ↦ [[P⁺fP⁺, P⁺fP⁻], [P⁻fP⁺, P⁻fP⁻]] as blocks of the multiplication operator.

    Off-diagonal norms are recorded at the Schatten index d + 1.
    """
    matrix = mult_op(f, w).matrix
    positive = w.indices >= 1
    return BlockOp(
        w,
        matrix[np.ix_(positive, positive)],
        matrix[np.ix_(positive, ~positive)],
        matrix[np.ix_(~positive, positive)],
        matrix[np.ix_(~positive, ~positive)],
        schatten_index=float(d + 1),
    )


def phi_d_eval(ops: Sequence[BlockOp], const: CocycleConstants) -> complex:
    """
    c_φ · Tr[z · offdiag(a⁰) ⋯ offdiag(a^d)] with z = diag(1, −1).

    Raises:
        LabError: ``BadParams`` for the wrong number of inputs; ``WindowMismatch``
    """
    if len(ops) != const.d + 1:
        raise LabError("BadParams", f"φ_{const.d} takes {const.d + 1} arguments, got {len(ops)}")
    window = ops[0].window
    if any(op.window != window for op in ops):
        raise LabError("WindowMismatch", "φ_d arguments on different windows")
    _, grading = hardy_projection(window)
    product = grading
    for op in ops:
        product = product @ op.offdiag()
    return const.c_phi * trace_guarded(product)


# =============================================================================
# Cochains on cyclic words
# =============================================================================


def _grading_diagonal(w: WindowSpec) -> np.ndarray:
    return np.where(w.indices >= 1, 1.0, -1.0)


def _graded_commutator(n: int, w: WindowSpec) -> sp.csr_matrix:
    """[F, M_{e_n}] as a sparse matrix: entry (m+n, m) is F_{m+n} − F_m."""
    grading = _grading_diagonal(w)
    size = w.size
    if abs(n) >= size:
        return sp.csr_matrix((size, size), dtype=complex)
    columns = np.arange(max(0, -n), min(size, size - n))
    rows = columns + n
    values = grading[rows] - grading[columns]
    keep = values != 0
    return sp.csr_matrix(
        (values[keep].astype(complex), (rows[keep], columns[keep])), shape=(size, size)
    )


def _word_trace(word: tuple[tuple[int, ...], ...], w: WindowSpec) -> complex:
    """Guarded trace of F·[F,e_{n₀}]⋯[F,e_{n_d}] for a word of characters."""
    product = sp.diags(_grading_diagonal(w).astype(complex)).tocsr()
    for letter in word:
        product = product @ _graded_commutator(letter[0], w)
        if product.nnz == 0:
            return 0j
    inner = w.inner
    return complex(product.diagonal()[inner].sum())


def cochain_a_terms(word: LambdaChain, w: WindowSpec, const: CocycleConstants) -> list[complex]:
    """
    Contribution c_a · coeff · Tr(F[F,f₀]⋯[F,f_d]) of each word of the chain.

    Words of nonzero total Fourier degree contribute exactly 0.
    """
    if word.dim != 1:
        raise LabError("DimMismatch", "the Fredholm module lives on the circle")
    if word.degree != const.d:
        raise LabError("BadParams", f"chain degree {word.degree} for the cochain of degree {const.d}")
    terms = []
    for letters, coeff in word.terms:
        if sum(letter[0] for letter in letters) != 0:
            terms.append(0j)
            continue
        if max(abs(letter[0]) for letter in letters) > w.guard:
            raise LabError("BandwidthExceedsGuard", f"word {letters} exceeds guard {w.guard}")
        terms.append(const.c_a * to_complex(coeff) * _word_trace(letters, w))
    return terms


def cochain_a(word: LambdaChain, w: WindowSpec, const: CocycleConstants) -> complex:
    """c_a · Tr(F[F,f₀]⋯[F,f_d]) extended linearly over the chain."""
    return sum(cochain_a_terms(word, w, const), 0j)


def cochain_b(word: LambdaChain, d: int = 1) -> complex:
    """
    Σ ∫_{S¹} f₀ df₁ over the chain: the form-side cochain ∫ Â ∧ π(word) on the circle.

    Raises:
        LabError: ``UnsupportedDimension`` unless d = 1
    """
    if d != 1:
        raise LabError("UnsupportedDimension", f"the form-side cochain is implemented for d=1, got {d}")
    if word.dim != 1 or word.degree != 1:
        raise LabError("BadParams", "expected a degree-1 chain on the circle")
    return sum((word_form(letters, coeff, 1).integrate() for letters, coeff in word.terms), 0j)


# =============================================================================
# Comparison
# =============================================================================


class KappaWindow(BaseModel):
    """Ratio statistics of cochain_a / cochain_b at one window."""

    N: int
    guard: int
    kappa_re: float
    kappa_im: float
    kappa_spread: float
    cycles_used: int


class CocycleComparison(BaseModel):
    """Measured constant relating the two cochains across a window sweep."""

    cycles: list[dict]
    windows: list[KappaWindow]
    kappa_re: float
    kappa_im: float
    kappa_spread: float
    kappa_drift: float
    deviation_from_one: float


def compare_ab(
    cycles: Sequence[LambdaChain],
    windows: Sequence[WindowSpec],
    const: CocycleConstants | None = None,
) -> CocycleComparison:
    """
    Measure κ = cochain_a / cochain_b over b-cycles and windows.

    Args:
        cycles: Degree-1 b-cycles on the circle
        windows: Window sweep; the drift compares the last two windows
        const: Cocycle constants (d = 1 when omitted)

    Returns:
        CocycleComparison with per-window mean and spread of κ

    Raises:
        LabError: ``NotACycle`` for a non-cycle; ``DegenerateComparison`` when
            every cochain_b value vanishes
    """
    const = const or CocycleConstants.for_degree(1)
    for cycle in cycles:
        if not boundary_b(cycle).is_zero:
            raise LabError("NotACycle", f"chain {cycle.to_json()} is not a b-cycle")
    form_side = [cochain_b(cycle, const.d) for cycle in cycles]
    used = [i for i, value in enumerate(form_side) if abs(value) > DEGENERATE_TOL]
    if not used:
        raise LabError("DegenerateComparison", "every form-side value vanishes")

    rows = []
    for w in windows:
        kappas = np.array([cochain_a(cycles[i], w, const) / form_side[i] for i in used])
        mean = complex(np.mean(kappas))
        spread = float(np.max(np.abs(kappas - mean)))
        logger.debug("compare_ab N=%d: kappa=%s spread=%.2e", w.N, mean, spread)
        rows.append(
            KappaWindow(
                N=w.N,
                guard=w.guard,
                kappa_re=mean.real,
                kappa_im=mean.imag,
                kappa_spread=spread,
                cycles_used=len(used),
            )
        )

    last = complex(rows[-1].kappa_re, rows[-1].kappa_im)
    drift = 0.0
    if len(rows) > 1:
        drift = abs(last - complex(rows[-2].kappa_re, rows[-2].kappa_im))
    return CocycleComparison(
        cycles=[cycle.to_json() for cycle in cycles],
        windows=rows,
        kappa_re=last.real,
        kappa_im=last.imag,
        kappa_spread=max(row.kappa_spread for row in rows),
        kappa_drift=drift,
        deviation_from_one=abs(last - 1),
    )
