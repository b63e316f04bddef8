"""
Finite Fourier-window operator algebra on L²(S¹).

Operators are dense complex matrices over the modes −N..N. Every trace and
determinant restricts to the inner window [−N+B, N−B]; for banded operators the
truncation artifacts stay within the guard band B of the edges.

Hardy-space compressions (Toeplitz operators) live on the modes 1..N and use
the leading block 1..N−B as their inner window.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from src.errors import LabError
from src.fourier import TrigPoly, UnitFunction, unit_coefficients

logger = logging.getLogger(__name__)

TOEPLITZ_TAIL_TOL = 1e-12
RANK_RTOL = 1e-8
CONDITION_FLOOR = 1e-8


@dataclass(frozen=True)
class WindowSpec:
    """Modes −N..N with a guard band of width ``guard``."""

    N: int
    guard: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise LabError("BadWindow", f"N must be positive, got {self.N}")
        if not 0 <= self.guard < self.N:
            raise LabError("BadWindow", f"need 0 <= guard < N, got guard={self.guard}, N={self.N}")

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def inner(self) -> slice:
        """Positions of the inner window [−N+B, N−B]."""
        return slice(self.guard, self.size - self.guard)


class Support(str, Enum):
    """Index set an operator matrix acts on."""

    WINDOW = "window"  # modes -N..N
    HARDY = "hardy"  # modes 1..N


@dataclass(frozen=True, eq=False)
class TruncOp:
    """Dense matrix of a truncated operator."""

    window: WindowSpec
    matrix: np.ndarray
    graded: str | None = None
    support: Support = Support.WINDOW

    def __post_init__(self):
        n = self.window.size if self.support is Support.WINDOW else self.window.N
        if self.matrix.shape != (n, n):
            raise LabError("WindowMismatch", f"matrix {self.matrix.shape} on a {n}-mode support")

    @classmethod
    def identity(cls, window: WindowSpec, support: Support = Support.WINDOW) -> "TruncOp":
        n = window.size if support is Support.WINDOW else window.N
        return cls(window, np.eye(n, dtype=complex), support=support)

    @property
    def inner(self) -> slice:
        if self.support is Support.WINDOW:
            return self.window.inner
        return slice(0, self.window.N - self.window.guard)

    def inner_block(self) -> np.ndarray:
        return self.matrix[self.inner, self.inner]

    def _check(self, other: "TruncOp") -> None:
        if other.window != self.window or other.support is not self.support:
            raise LabError("WindowMismatch", f"{self.window}/{self.support} vs {other.window}/{other.support}")

    def __matmul__(self, other: "TruncOp") -> "TruncOp":
        self._check(other)
        return TruncOp(self.window, self.matrix @ other.matrix, support=self.support)

    def __add__(self, other: "TruncOp") -> "TruncOp":
        self._check(other)
        return TruncOp(self.window, self.matrix + other.matrix, support=self.support)

    def __sub__(self, other: "TruncOp") -> "TruncOp":
        self._check(other)
        return TruncOp(self.window, self.matrix - other.matrix, support=self.support)

    def __mul__(self, c: complex) -> "TruncOp":
        return TruncOp(self.window, c * self.matrix, self.graded, self.support)

    __rmul__ = __mul__


def banded_matrix(coeffs: dict[int, complex], rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Matrix M[m, n] = coeffs[m − n] over consecutive row and column modes."""
    column = np.zeros(len(rows), dtype=complex)
    row = np.zeros(len(cols), dtype=complex)
    for k, c in coeffs.items():
        # first column holds offsets rows - cols[0], first row holds rows[0] - cols
        offset_col = k - (rows[0] - cols[0])
        if 0 <= offset_col < len(rows):
            column[offset_col] = c
        offset_row = (rows[0] - cols[0]) - k
        if 0 <= offset_row < len(cols):
            row[offset_row] = c
    return scipy.linalg.toeplitz(column, row)


def mult_op(f: TrigPoly, w: WindowSpec) -> TruncOp:
    """
    Multiplication operator M_f on the window.

    Raises:
        LabError: ``BandwidthExceedsGuard`` when deg f > B
    """
    if f.dim != 1:
        raise LabError("DimMismatch", "multiplication operators act on the circle")
    if f.degree > w.guard:
        raise LabError("BandwidthExceedsGuard", f"degree {f.degree} > guard {w.guard}")
    coeffs = {n[0]: c for n, c in f.numeric_coeffs().items()}
    return TruncOp(w, banded_matrix(coeffs, w.indices, w.indices))


def hardy_projection(w: WindowSpec) -> tuple[TruncOp, TruncOp]:
    """P⁺ onto modes n ≥ 1 and F = P⁺ − P⁻."""
    positive = (w.indices >= 1).astype(complex)
    p_plus = TruncOp(w, np.diag(positive), graded="hardy")
    grading = TruncOp(w, np.diag(2 * positive - 1), graded="hardy")
    return p_plus, grading


def commutator(a: TruncOp, b: TruncOp) -> TruncOp:
    """[A, B] = AB − BA."""
    return a @ b - b @ a


def trace_guarded(a: TruncOp) -> complex:
    """Trace over the inner window only."""
    return complex(np.trace(a.inner_block()))


def schatten_norm(a: TruncOp, p: float = 1.0) -> float:
    """Schatten p-norm of the inner block (p = inf gives the operator norm)."""
    if p < 1:
        raise LabError("BadParams", f"Schatten index must be >= 1, got {p}")
    singular = scipy.linalg.svdvals(a.inner_block())
    if singular.size == 0:
        return 0.0
    if np.isinf(p):
        return float(singular.max())
    return float(np.sum(singular**p) ** (1.0 / p))


def _symbol_coefficients(u: UnitFunction, bandwidth: int) -> dict[int, complex]:
    coeffs, tail = unit_coefficients(u, bandwidth)
    if tail > TOEPLITZ_TAIL_TOL:
        raise LabError("ToeplitzBandwidth", f"symbol tail {tail:.3e} above degree {bandwidth}")
    return coeffs


def toeplitz(u: UnitFunction, w: WindowSpec) -> TruncOp:
    """
    Toeplitz compression P⁺ M_u P⁺ on the modes 1..N.

    Raises:
        LabError: ``ToeplitzBandwidth`` if u is not captured at degree B
    """
    coeffs = _symbol_coefficients(u, w.guard)
    modes = np.arange(1, w.N + 1)
    return TruncOp(w, banded_matrix(coeffs, modes, modes), graded="toeplitz", support=Support.HARDY)


def fredholm_det(a: TruncOp, concentration_tol: float = 1e-10) -> complex:
    """
    det(I + K) on the inner block, by LU factorization with partial pivoting.

    Args:
        a: Operator of the form I + K
        concentration_tol: Allowed size of K outside the inner block; for Hardy
            blocks only the coupling to the far edge is checked

    Returns:
        Determinant of the inner block

    Raises:
        LabError: ``KernelNotConcentrated`` or ``SingularDeterminant``
    """
    kernel = a.matrix - np.eye(a.matrix.shape[0])
    inner = np.zeros(a.matrix.shape[0], dtype=bool)
    inner[a.inner] = True
    if a.support is Support.WINDOW:
        outside = kernel[~np.outer(inner, inner)]
    else:
        outside = np.concatenate([kernel[inner][:, ~inner].ravel(), kernel[~inner][:, inner].ravel()])
    leak = float(np.max(np.abs(outside))) if outside.size else 0.0
    if leak > concentration_tol:
        raise LabError("KernelNotConcentrated", f"|K| = {leak:.3e} outside the inner window")

    block = a.inner_block()
    lu, piv = scipy.linalg.lu_factor(block, check_finite=True)
    diag = np.diag(lu)
    if np.min(np.abs(diag)) <= np.finfo(float).eps * max(np.max(np.abs(diag)), 1.0):
        raise LabError("SingularDeterminant", "pivot below machine precision")
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    det = complex(np.prod(diag)) * (-1) ** swaps
    logger.debug("fredholm_det: block %d, leak %.2e, det %s", len(diag), leak, det)
    return det


def det_mult_commutator(
    u1: UnitFunction, u2: UnitFunction, w: WindowSpec, concentration_tol: float = 1e-8
) -> complex:
    """
    det(T_{u1} T_{u2} T_{u1}^{-1} T_{u2}^{-1}) on the leading Hardy block.

    Raises:
        LabError: ``WindingNotZero`` or ``ToeplitzIllConditioned``
    """
    if any(u1.winding) or any(u2.winding):
        raise LabError("WindingNotZero", f"windings {u1.winding}, {u2.winding}")
    if u1.is_constant or u2.is_constant:
        return 1.0 + 0j

    t1 = toeplitz(u1, w).matrix
    t2 = toeplitz(u2, w).matrix
    for name, t in (("T_u1", t1), ("T_u2", t2)):
        smallest = float(scipy.linalg.svdvals(t).min())
        if smallest < CONDITION_FLOOR:
            raise LabError("ToeplitzIllConditioned", f"{name} has singular value {smallest:.3e}")

    # T1 T2 (T2 T1)^{-1}
    forward = t1 @ t2
    backward = t2 @ t1
    product = scipy.linalg.solve(backward.T, forward.T).T
    op = TruncOp(w, product, graded="toeplitz", support=Support.HARDY)
    return fredholm_det(op, concentration_tol)


def _nullity(matrix: np.ndarray) -> int:
    singular = scipy.linalg.svdvals(matrix)
    if singular.size == 0 or singular.max() == 0:
        return matrix.shape[1]
    threshold = RANK_RTOL * singular.max()
    near = singular[(singular > threshold / 10) & (singular < threshold * 10)]
    if near.size:
        raise LabError("RankAmbiguous", f"singular value {near[0]:.3e} near threshold {threshold:.3e}")
    return matrix.shape[1] - int(np.count_nonzero(singular > threshold))


def toeplitz_index(u: UnitFunction, w: WindowSpec) -> int:
    """
    Fredholm index of T_u, dim ker − dim coker, by numerical rank.

    Kernels are measured on the exact restriction of T_u (and of its adjoint) to
    the first N modes, which lands in the first N + B modes.
    """
    coeffs = _symbol_coefficients(u, w.guard)
    domain = np.arange(1, w.N + 1)
    target = np.arange(1, w.N + w.guard + 1)
    restricted = banded_matrix(coeffs, target, domain)
    adjoint_coeffs = {-n: c.conjugate() for n, c in coeffs.items()}
    restricted_adjoint = banded_matrix(adjoint_coeffs, target, domain)
    index = _nullity(restricted) - _nullity(restricted_adjoint)
    logger.debug("toeplitz_index: winding %s -> index %d at N=%d", u.winding, index, w.N)
    return index
