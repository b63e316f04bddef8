"""
Trigonometric polynomials on the torus T^k (k ≤ 3) and their units.

Coefficients live in the exact ring ℚ(i)[τ], where the indeterminate τ stands for
2πi. Differentiating e_n = exp(2πi⟨n,t⟩) multiplies by τ·n, so every structure
constant of the form calculus stays exact and the structural identities
(Leibniz, d² = 0, b∘b = 0) hold with error exactly zero. Floats enter through
their exact binary rational value; numerical consumers convert back with
:func:`to_complex`.

Units are stored as (winding vector, log part): u = exp(2πi⟨w,t⟩)·exp(g).
"""

import cmath
import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np
from sympy import QQ
from sympy.polys.domains import QQ_I
from sympy.polys.rings import PolyElement, ring

from src.errors import LabError

logger = logging.getLogger(__name__)

TauRing, TAU = ring("tau", QQ_I)
TWO_PI_I = 2j * math.pi
MAX_DIM = 3

Index = tuple[int, ...]


# =============================================================================
# Exact scalars
# =============================================================================


def _rational(x: float):
    try:
        frac = Fraction(x)
    except (ValueError, OverflowError) as e:
        raise LabError("NonFiniteValue", f"cannot represent {x!r} exactly") from e
    return QQ(frac.numerator, frac.denominator)


def scalar(value: Any) -> PolyElement:
    """
    Convert a number into the exact coefficient ring ℚ(i)[τ].

    Args:
        value: int, Fraction, float, complex (numpy scalars included) or a ring element

    Returns:
        Ring element; floats are converted through their exact binary value
    """
    if isinstance(value, PolyElement):
        if value.ring != TauRing:
            raise TypeError(f"foreign polynomial ring: {value.ring}")
        return value
    if isinstance(value, (bool, int, np.integer)):
        return TauRing(int(value))
    if isinstance(value, Fraction):
        return TauRing(QQ_I(QQ(value.numerator, value.denominator), 0))
    if isinstance(value, (float, np.floating)):
        return TauRing(QQ_I(_rational(float(value)), 0))
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return TauRing(QQ_I(_rational(value.real), _rational(value.imag)))
    raise TypeError(f"not a scalar: {value!r}")


def to_complex(value: PolyElement) -> complex:
    """Numerical value of a ring element with τ = 2πi."""
    total = 0j
    for (k,), c in value.terms():
        total += complex(float(c.x), float(c.y)) * TWO_PI_I**k
    return total


def scalar_key(value: PolyElement) -> tuple:
    """Total order on ring elements, used for canonical orderings."""
    return tuple(
        (k, int(c.x.numerator), int(c.x.denominator), int(c.y.numerator), int(c.y.denominator))
        for (k,), c in sorted(value.terms())
    )


def tau_divisible(value: PolyElement) -> bool:
    """Whether the element is a multiple of τ."""
    return all(monom[0] > 0 for monom in value.keys())


def divide_tau(value: PolyElement) -> PolyElement:
    """Exact division by τ of a τ-divisible element."""
    return TauRing.from_dict({(monom[0] - 1,): c for monom, c in value.items()})


def _index(n: int | tuple[int, ...] | list[int]) -> Index:
    if isinstance(n, (int, np.integer)):
        return (int(n),)
    return tuple(int(x) for x in n)


def sample_grid(samples: int, dim: int) -> np.ndarray:
    """Uniform grid on [0,1)^dim, shape ``(samples,)*dim + (dim,)``."""
    axes = np.meshgrid(*([np.arange(samples) / samples] * dim), indexing="ij")
    return np.stack(axes, axis=-1)


# =============================================================================
# Trigonometric polynomials
# =============================================================================


@dataclass(frozen=True)
class TrigPoly:
    """
    Finitely supported Fourier series Σ c_n e_n on T^dim.

    ``terms`` is the sorted tuple of (index, coefficient) pairs with zero
    coefficients removed; build instances through :meth:`from_coeffs`.
    """

    dim: int
    terms: tuple[tuple[Index, PolyElement], ...] = ()

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise LabError("DimMismatch", f"torus dimension must be 1..{MAX_DIM}, got {self.dim}")
        for n, c in self.terms:
            if len(n) != self.dim:
                raise LabError("DimMismatch", f"index {n} on a {self.dim}-torus")
            if not c:
                raise LabError("BadParams", f"zero coefficient stored at {n}")

    # --- construction -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[Any, Any], dim: int | None = None) -> "TrigPoly":
        """
        Build a TrigPoly from a map index → coefficient.

        Args:
            coeffs: Keys are ints (dim 1) or integer tuples; values any scalar
            dim: Torus dimension; inferred from the keys when omitted

        Returns:
            Normalized TrigPoly
        """
        collected: dict[Index, PolyElement] = {}
        for n, c in coeffs.items():
            key = _index(n)
            if dim is None:
                dim = len(key)
            value = scalar(c)
            if value:
                collected[key] = collected.get(key, TauRing.zero) + value
        terms = tuple(sorted((n, c) for n, c in collected.items() if c))
        return cls(dim or 1, terms)

    @classmethod
    def zero(cls, dim: int = 1) -> "TrigPoly":
        return cls(dim)

    @classmethod
    def constant(cls, c: Any, dim: int = 1) -> "TrigPoly":
        return cls.from_coeffs({(0,) * dim: c}, dim)

    @classmethod
    def character(cls, n: int | tuple[int, ...], coeff: Any = 1) -> "TrigPoly":
        """The character e_n (times ``coeff``)."""
        key = _index(n)
        return cls.from_coeffs({key: coeff}, len(key))

    # --- inspection ---------------------------------------------------------

    @property
    def coeffs(self) -> dict[Index, PolyElement]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """max ‖n‖_∞ over the support (0 for the zero polynomial)."""
        return max((max(abs(x) for x in n) for n, _ in self.terms), default=0)

    @property
    def is_constant(self) -> bool:
        return all(not any(n) for n, _ in self.terms)

    def coefficient(self, n: int | tuple[int, ...]) -> PolyElement:
        return self.coeffs.get(_index(n), TauRing.zero)

    def zero_mode(self) -> PolyElement:
        return self.coefficient((0,) * self.dim)

    @cached_property
    def numeric(self) -> tuple[np.ndarray, np.ndarray]:
        """(indices of shape (K, dim), complex coefficients of shape (K,))."""
        if not self.terms:
            return np.zeros((0, self.dim), dtype=int), np.zeros(0, dtype=complex)
        ns = np.array([n for n, _ in self.terms], dtype=int)
        cs = np.array([to_complex(c) for _, c in self.terms], dtype=complex)
        return ns, cs

    def numeric_coeffs(self) -> dict[Index, complex]:
        ns, cs = self.numeric
        return {tuple(int(x) for x in n): complex(c) for n, c in zip(ns, cs, strict=True)}

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.numeric[1])))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        Evaluate at points of shape ``(..., dim)`` (or ``(...)`` when dim is 1).
        """
        points = np.asarray(points, dtype=float)
        if self.dim == 1 and (points.ndim == 0 or points.shape[-1] != 1):
            points = points[..., None]
        ns, cs = self.numeric
        phases = np.exp(TWO_PI_I * (points @ ns.T))
        return phases @ cs

    # --- arithmetic ---------------------------------------------------------

    def _promote(self, other: Any) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            if other.dim != self.dim:
                raise LabError("DimMismatch", f"dims {self.dim} and {other.dim}")
            return other
        return TrigPoly.constant(other, self.dim)

    def __add__(self, other: Any) -> "TrigPoly":
        other = self._promote(other)
        merged = self.coeffs
        for n, c in other.terms:
            merged[n] = merged.get(n, TauRing.zero) + c
        return TrigPoly.from_coeffs(merged, self.dim)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(self.dim, tuple((n, -c) for n, c in self.terms))

    def __sub__(self, other: Any) -> "TrigPoly":
        return self + (-self._promote(other))

    def __rsub__(self, other: Any) -> "TrigPoly":
        return self._promote(other) - self

    def __mul__(self, other: Any) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: Any) -> "TrigPoly":
        factor = scalar(c)
        if not factor:
            return TrigPoly.zero(self.dim)
        return TrigPoly.from_coeffs({n: v * factor for n, v in self.terms}, self.dim)

    # --- serialization ------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "coeffs": [
                {"n": list(n), "re": c.real, "im": c.imag}
                for n, c in self.numeric_coeffs().items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TrigPoly":
        dim = int(data["dim"])
        coeffs: dict[Index, complex] = {}
        for item in data.get("coeffs", []):
            key = _index(item["n"])
            coeffs[key] = coeffs.get(key, 0j) + complex(item.get("re", 0.0), item.get("im", 0.0))
        return cls.from_coeffs(coeffs, dim)


def mul(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """Convolution product of two trigonometric polynomials."""
    if f.dim != g.dim:
        raise LabError("DimMismatch", f"cannot multiply dims {f.dim} and {g.dim}")
    product: dict[Index, PolyElement] = {}
    for n1, c1 in f.terms:
        for n2, c2 in g.terms:
            key = tuple(a + b for a, b in zip(n1, n2, strict=True))
            product[key] = product.get(key, TauRing.zero) + c1 * c2
    return TrigPoly.from_coeffs(product, f.dim)


def derive(f: TrigPoly, axis: int = 0) -> TrigPoly:
    """∂/∂t_axis: multiplies the coefficient at n by 2πi·n_axis."""
    if not 0 <= axis < f.dim:
        raise LabError("AxisRange", f"axis {axis} on a {f.dim}-torus")
    return TrigPoly.from_coeffs({n: c * TAU * n[axis] for n, c in f.terms}, f.dim)


def integrate(f: TrigPoly) -> complex:
    """Integral over the unit-volume torus (the zero mode)."""
    return to_complex(f.zero_mode())


# =============================================================================
# Units
# =============================================================================


def _winding_samples(winding: tuple[int, ...], logpart: TrigPoly) -> int:
    spread = sum(abs(w) for w in winding) + logpart.degree * (1.0 + logpart.l1_norm())
    return int(max(64, 16 * math.ceil(spread + 1)))


def _axis_winding(line: np.ndarray) -> int:
    """Winding number of one closed sampled loop by argument tracking."""
    increments = np.angle(np.roll(line, -1) / line)
    if np.max(np.abs(increments)) > 0.75 * math.pi:
        raise LabError("WindingAmbiguous", "argument jumps too far between samples")
    total = float(np.sum(increments)) / (2 * math.pi)
    winding = round(total)
    if abs(total - winding) > 1e-6:
        raise LabError("WindingAmbiguous", f"argument increment {total} is not an integer")
    return int(winding)


@dataclass(frozen=True)
class UnitFunction:
    """
    Nowhere-vanishing function u(t) = exp(2πi⟨w,t⟩)·exp(g(t)).

    The winding vector is re-measured by argument tracking on construction.
    """

    winding: tuple[int, ...]
    logpart: TrigPoly

    def __post_init__(self):
        if not isinstance(self.logpart, TrigPoly):
            raise TypeError("logpart must be a TrigPoly; windings enter through the winding vector")
        object.__setattr__(self, "winding", tuple(int(w) for w in self.winding))
        if len(self.winding) != self.logpart.dim:
            raise LabError(
                "DimMismatch", f"winding {self.winding} on a {self.logpart.dim}-torus"
            )
        measured = recompute_winding(self)
        if measured != self.winding:
            raise LabError("WindingMismatch", f"declared {self.winding}, measured {measured}")

    @classmethod
    def exp(cls, g: TrigPoly) -> "UnitFunction":
        return cls((0,) * g.dim, g)

    @classmethod
    def character(cls, winding: int | tuple[int, ...]) -> "UnitFunction":
        w = _index(winding)
        return cls(w, TrigPoly.zero(len(w)))

    @classmethod
    def constant(cls, c: complex, dim: int = 1) -> "UnitFunction":
        """Constant unit with the principal logarithm, argument in (−π, π]."""
        if abs(c) == 0:
            raise LabError("UnitVanishes", "constant unit must be nonzero")
        return cls((0,) * dim, TrigPoly.constant(cmath.log(c), dim))

    @property
    def dim(self) -> int:
        return self.logpart.dim

    @property
    def is_constant(self) -> bool:
        return not any(self.winding) and self.logpart.is_constant

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self.dim == 1 and (points.ndim == 0 or points.shape[-1] != 1):
            points = points[..., None]
        linear = points @ np.array(self.winding, dtype=float)
        return np.exp(TWO_PI_I * linear + self.logpart.evaluate(points))

    def __mul__(self, other: "UnitFunction") -> "UnitFunction":
        if other.dim != self.dim:
            raise LabError("DimMismatch", f"dims {self.dim} and {other.dim}")
        winding = tuple(a + b for a, b in zip(self.winding, other.winding, strict=True))
        return UnitFunction(winding, self.logpart + other.logpart)

    def inverse(self) -> "UnitFunction":
        return UnitFunction(tuple(-w for w in self.winding), -self.logpart)

    def to_json(self) -> dict[str, Any]:
        return {"winding": list(self.winding), "log": self.logpart.to_json()}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "UnitFunction":
        logpart = TrigPoly.from_json(data["log"])
        winding = data.get("winding", [0] * logpart.dim)
        return cls(_index(winding), logpart)


def recompute_winding(u: UnitFunction) -> tuple[int, ...]:
    """Measure the winding vector of ``u`` along each coordinate loop."""
    samples = _winding_samples(u.winding, u.logpart)
    ts = np.arange(samples) / samples
    winding = []
    for axis in range(u.dim):
        points = np.zeros((samples, u.dim))
        points[:, axis] = ts
        winding.append(_axis_winding(u.evaluate(points)))
    return tuple(winding)


def exp_unit(f: TrigPoly, out_degree: int, tail_tol: float = 1e-12) -> UnitFunction:
    """
    The unit exp(f), validated against its truncated Fourier expansion.

    Args:
        f: Exponent; must be a TrigPoly
        out_degree: Fourier degree the expansion of exp(f) is truncated to
        tail_tol: Allowed sup-norm error of the truncated expansion

    Returns:
        UnitFunction with winding 0 and log part f

    Raises:
        TypeError: If ``f`` is not a TrigPoly
        LabError: ``TailTolExceeded`` when exp(f) is not captured at ``out_degree``
    """
    if not isinstance(f, TrigPoly):
        raise TypeError("exp_unit expects a TrigPoly; windings enter through UnitFunction")
    if out_degree < f.degree or tail_tol <= 0:
        raise LabError("BadParams", f"need out_degree >= {f.degree} and tail_tol > 0")

    samples = 4 * max(out_degree, 1)
    grid = sample_grid(samples, f.dim)
    values = np.exp(f.evaluate(grid))
    spectrum = np.fft.fftn(values)
    freqs = np.rint(np.fft.fftfreq(samples, d=1.0 / samples)).astype(int)
    keep = np.ones(values.shape, dtype=bool)
    for axis in range(f.dim):
        shape = [1] * f.dim
        shape[axis] = samples
        keep &= (np.abs(freqs) <= out_degree).reshape(shape)
    truncated = np.fft.ifftn(np.where(keep, spectrum, 0))
    error = float(np.max(np.abs(truncated - values)))
    if error > tail_tol:
        raise LabError("TailTolExceeded", f"sup error {error:.3e} > {tail_tol:.3e}")
    return UnitFunction.exp(f)


def _continuous_phase(values: np.ndarray) -> np.ndarray:
    phase = np.angle(values)
    dim = values.ndim
    for axis in range(dim):
        index = tuple([slice(None)] * (axis + 1) + [0] * (dim - axis - 1))
        phase[index] = np.unwrap(phase[index], axis=axis)
    return phase


def log_unit(
    u: Callable[[np.ndarray], np.ndarray],
    samples_per_period: int,
    dim: int = 1,
    tol: float = 1e-10,
    drop_tol: float = 1e-14,
) -> tuple[tuple[int, ...], TrigPoly]:
    """
    Recover (winding, log part) from samples of a unit.

    Args:
        u: Callable mapping points of shape ``(..., dim)`` to complex values
        samples_per_period: Grid size per axis (at least 4x the expected degree)
        dim: Torus dimension
        tol: Allowed round-trip error of the recovered logarithm on the grid
        drop_tol: Recovered coefficients below this magnitude are discarded

    Returns:
        Tuple (winding vector, log part g) with u = exp(2πi⟨w,t⟩)·exp(g)

    Raises:
        LabError: ``UnitVanishes``, ``WindingAmbiguous`` or ``TailTolExceeded``
    """
    samples = int(samples_per_period)
    if samples < 4:
        raise LabError("BadParams", f"need at least 4 samples per period, got {samples}")
    grid = sample_grid(samples, dim)
    values = np.asarray(u(grid), dtype=complex).reshape((samples,) * dim)
    if float(np.min(np.abs(values))) < 1e-12:
        raise LabError("UnitVanishes", "unit is numerically zero at a sample")

    winding = []
    for axis in range(dim):
        index = tuple(slice(None) if a == axis else 0 for a in range(dim))
        winding.append(_axis_winding(values[index]))

    linear = grid @ np.array(winding, dtype=float)
    reduced = values * np.exp(-TWO_PI_I * linear)
    logs = np.log(np.abs(reduced)) + 1j * _continuous_phase(reduced)

    # principal branch for the mean: imaginary part in (-pi, pi]
    mean_imag = float(np.mean(logs).imag)
    turns = math.ceil((mean_imag - math.pi) / (2 * math.pi))
    logs = logs - 2j * math.pi * turns

    spectrum = np.fft.fftn(logs) / samples**dim
    freqs = np.rint(np.fft.fftfreq(samples, d=1.0 / samples)).astype(int)
    coeffs: dict[Index, complex] = {}
    for position in np.ndindex(*spectrum.shape):
        n = tuple(int(freqs[p]) for p in position)
        if any(2 * abs(x) >= samples for x in n):
            continue
        c = complex(spectrum[position])
        if abs(c) > drop_tol:
            coeffs[n] = c
    g = TrigPoly.from_coeffs(coeffs, dim)

    error = float(np.max(np.abs(g.evaluate(grid) - logs)))
    if error > tol:
        raise LabError("TailTolExceeded", f"log round-trip error {error:.3e} > {tol:.3e}")
    logger.debug("log_unit: winding=%s, %d modes, error=%.2e", winding, len(coeffs), error)
    return tuple(winding), g


def unit_coefficients(
    u: UnitFunction, bandwidth: int, samples: int | None = None
) -> tuple[dict[int, complex], float]:
    """
    Fourier coefficients of a unit on the circle up to ``bandwidth``.

    Args:
        u: Unit on S¹
        bandwidth: Largest |n| kept
        samples: FFT grid size; chosen from the symbol when omitted

    Returns:
        Tuple (coefficients for |n| ≤ bandwidth, ℓ¹ mass of the discarded modes)
    """
    if u.dim != 1:
        raise LabError("DimMismatch", "operator symbols live on the circle")
    if samples is None:
        reach = bandwidth + abs(u.winding[0]) + u.logpart.degree + 1
        samples = 1 << max(8, math.ceil(math.log2(4 * reach)))
    ts = np.arange(samples) / samples
    spectrum = np.fft.fft(u.evaluate(ts)) / samples
    freqs = np.rint(np.fft.fftfreq(samples, d=1.0 / samples)).astype(int)
    inside = np.abs(freqs) <= bandwidth
    coeffs = {int(n): complex(c) for n, c in zip(freqs[inside], spectrum[inside], strict=True)}
    tail = float(np.sum(np.abs(spectrum[~inside])))
    return coeffs, tail
