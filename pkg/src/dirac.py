"""
Spectral invariants of holonomy-twisted Dirac operators on the circle.

The operator twisted by a flat line of holonomy v = e^{iθ} has spectrum
{2πn + θ : n ∈ ℤ}. Its eta invariant has the closed form 1 − θ/π and is checked
against an independent Hurwitz-zeta evaluation by Euler–Maclaurin summation.
"""

import cmath
import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import bernoulli, factorial, poch

from src.cz import CZValue, cz_sum, reduce
from src.errors import LabError
from src.forms import Form, PeriodicFamily, Truncation, family_wedge, is_closed, shift
from src.fourier import TrigPoly

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class CircleDirac:
    """Dirac operator on S¹ twisted by a flat line with holonomy ``holonomy``."""

    holonomy: complex
    theta: float = field(init=False)

    def __post_init__(self):
        v = complex(self.holonomy)
        if abs(abs(v) - 1.0) > UNITARY_TOL:
            raise LabError("NotUnitary", f"|v| = {abs(v)!r}")
        if abs(v - 1.0) <= UNITARY_TOL:
            theta = 0.0
        else:
            # log(v)/(πi) in (0, 2)
            theta = cmath.phase(v) % (2 * math.pi)
        object.__setattr__(self, "holonomy", v)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_theta(cls, theta: float) -> "CircleDirac":
        return cls(cmath.exp(1j * theta))

    @property
    def has_kernel(self) -> bool:
        return self.theta == 0.0


def spectrum(D: CircleDirac, N: int) -> np.ndarray:
    """Eigenvalues 2πn + θ for n = −N..N."""
    if N < 1:
        raise LabError("BadParams", f"N must be positive, got {N}")
    return 2 * math.pi * np.arange(-N, N + 1) + D.theta


def eta_xi_closed(D: CircleDirac) -> tuple[float, CZValue]:
    """
    Closed-form eta invariant and reduced eta invariant ξ = [(η + dim ker)/2].

    Returns:
        Tuple (eta, xi)
    """
    if D.has_kernel:
        return 0.0, reduce(0.5)
    eta = 1.0 - D.theta / math.pi
    return eta, reduce(eta / 2)


def hurwitz_zeta(s: float, a: float, terms: int = 20, corrections: int = 10) -> float:
    """
    ζ(s, a) = Σ_{k≥0} (k + a)^{−s} by Euler–Maclaurin summation.

    The sum is split after ``terms`` terms; the tail is replaced by its integral,
    the boundary half-term and ``corrections`` Bernoulli terms.

    Args:
        s: Real exponent, s ≠ 1
        a: Shift in (0, 1]
        terms: Number of terms summed directly
        corrections: Number of Bernoulli correction terms (at least 10)

    Returns:
        The Hurwitz zeta value

    Raises:
        LabError: ``OracleNotConverged`` if the first omitted correction exceeds 1e-9
    """
    if s == 1:
        raise LabError("BadParams", "Hurwitz zeta has a pole at s = 1")
    if not 0 < a <= 1:
        raise LabError("BadParams", f"shift must lie in (0, 1], got {a}")
    if corrections < 10:
        raise LabError("BadParams", f"need at least 10 correction terms, got {corrections}")

    head = math.fsum((k + a) ** (-s) for k in range(terms))
    x = terms + a
    total = head + x ** (1 - s) / (s - 1) + x ** (-s) / 2

    b = bernoulli(2 * corrections + 2)

    def correction(j: int) -> float:
        return b[2 * j] / factorial(2 * j, exact=False) * poch(s, 2 * j - 1) * x ** (1 - s - 2 * j)

    total += math.fsum(correction(j) for j in range(1, corrections + 1))
    remainder = abs(correction(corrections + 1))
    if remainder > ORACLE_TOL:
        raise LabError("OracleNotConverged", f"remainder estimate {remainder:.3e} at s={s}, a={a}")
    return float(total)


def eta_function(D: CircleDirac, s: float) -> float:
    """
    η(s) = Σ sign(λ)|λ|^{−s} over the nonzero spectrum, for s away from 1.

    The positive eigenvalues are 2π(k + a) and the negative ones −2π(k + 1 − a)
    with a = θ/2π; without holonomy the zero mode is dropped and a = 1.
    """
    a = D.theta / (2 * math.pi) if not D.has_kernel else 1.0
    positive = hurwitz_zeta(s, a)
    negative = hurwitz_zeta(s, 1.0 - a if not D.has_kernel else 1.0)
    return (2 * math.pi) ** (-s) * (positive - negative)


def eta_zeta_oracle(D: CircleDirac) -> float:
    """η(0) from the Hurwitz-zeta regularization."""
    eta = eta_function(D, 0.0)
    logger.debug("eta oracle at theta=%.6f: %.12f", D.theta, eta)
    return eta


def ahat_circle() -> PeriodicFamily:
    """The local index form of the untwisted circle: the constant 1 at p = 0."""
    return PeriodicFamily.build(1, [(0, Form.function(TrigPoly.constant(1)))])


def rho_tilde(gamma: PeriodicFamily, d: int = 1) -> complex:
    """
    ∫_{S¹} Â ∧ ι_{d+1} γ.

    Only the top-degree form of entry p = (d+1)/2 of the shifted family is
    integrated; on S¹ this is the 1-form at p = 1 for d = 1.

    Raises:
        LabError: ``EvenDimension``, ``DimMismatch`` or ``NotClosed``
    """
    if d % 2 == 0:
        raise LabError("EvenDimension", f"ρ̃ is defined in odd degree, got d={d}")
    if gamma.is_zero:
        return 0j
    if gamma.dim != 1:
        raise LabError("DimMismatch", f"family lives on T^{gamma.dim}, not on the circle")
    if not is_closed(gamma):
        raise LabError("NotClosed", "ρ̃ needs a closed family")
    untruncated = PeriodicFamily.build(gamma.dim, list(gamma.forms()), Truncation.NONE)
    product = family_wedge(ahat_circle(), shift(untruncated, d + 1))
    return sum((form.integrate() for form in product.entry((d + 1) // 2)), 0j)


@dataclass(frozen=True)
class GradedBundle:
    """ℤ/2-graded flat bundle: summands (holonomy, grading ±1)."""

    summands: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        summands = tuple((complex(v), int(eps)) for v, eps in self.summands)
        if not summands:
            raise LabError("BadParams", "graded bundle needs at least one summand")
        for v, eps in summands:
            if eps not in (1, -1):
                raise LabError("BadParams", f"grading must be ±1, got {eps}")
            if abs(abs(v) - 1.0) > UNITARY_TOL:
                raise LabError("NotUnitary", f"|v| = {abs(v)!r}")
        object.__setattr__(self, "summands", summands)

    @classmethod
    def line(cls, v: complex, eps: int = 1) -> "GradedBundle":
        return cls(((v, eps),))

    def __add__(self, other: "GradedBundle") -> "GradedBundle":
        return GradedBundle(self.summands + other.summands)

    def to_json(self) -> dict[str, Any]:
        return {
            "summands": [{"v_re": v.real, "v_im": v.imag, "eps": eps} for v, eps in self.summands]
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GradedBundle":
        return cls(
            tuple(
                (complex(item["v_re"], item.get("v_im", 0.0)), int(item.get("eps", 1)))
                for item in data["summands"]
            )
        )


def rho_dirac(V: GradedBundle, gamma: PeriodicFamily | None = None) -> CZValue:
    """ρ(x) = Σ ε_i ξ(D ⊗ V_i) + [ρ̃(γ)] on the circle."""
    xis: Iterable[CZValue] = (
        eta_xi_closed(CircleDirac(v))[1].scale(eps) for v, eps in V.summands
    )
    value = cz_sum(xis)
    if gamma is not None:
        value = value + reduce(rho_tilde(gamma, 1))
    return value
