"""
Complex numbers modulo the integers.

Every regulator value, xi invariant and Deligne pairing in the lab lands in ℂ/ℤ.
Values are stored by a canonical representative whose real part lies in [0, 1).
"""

import cmath
import math
from dataclasses import dataclass
from typing import Any

from src.errors import LabError

# Defaults used when a scenario does not override its tolerance.
EXACT_ABS_TOL = 1e-9
TRUNCATION_ABS_TOL = 1e-5


@dataclass(frozen=True)
class TolerancePolicy:
    """Absolute/relative tolerance pair used by every comparison."""

    abs_tol: float = EXACT_ABS_TOL
    rel_tol: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.abs_tol) and math.isfinite(self.rel_tol)):
            raise LabError("BadParams", f"tolerances must be finite, got {self}")
        if self.abs_tol <= 0 or self.rel_tol < 0:
            raise LabError(
                "BadParams", f"need abs_tol > 0 and rel_tol >= 0, got {self.abs_tol}, {self.rel_tol}"
            )

    def threshold(self, scale: float = 0.0) -> float:
        """Allowed absolute error for a quantity of magnitude ``scale``."""
        return self.abs_tol + self.rel_tol * abs(scale)


@dataclass(frozen=True)
class CZValue:
    """Element of ℂ/ℤ held by its canonical representative."""

    rep: complex

    def __add__(self, other: "CZValue") -> "CZValue":
        return reduce(self.rep + other.rep)

    def __sub__(self, other: "CZValue") -> "CZValue":
        return reduce(self.rep - other.rep)

    def __neg__(self) -> "CZValue":
        return reduce(-self.rep)

    def scale(self, n: int) -> "CZValue":
        """Integer multiple; ℂ/ℤ is only a ℤ-module."""
        return reduce(n * self.rep)

    def exp(self) -> complex:
        """exp(2πi·z), the well-defined character of the class."""
        return cmath.exp(2j * math.pi * self.rep)

    def distance(self, other: "CZValue") -> float:
        """Smallest |a − b − n| over the neighbouring integers."""
        diff = self.rep - other.rep
        return min(abs(diff - n) for n in (-1, 0, 1))

    def to_json(self) -> dict[str, float]:
        return {"re": self.rep.real, "im": self.rep.imag}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "CZValue":
        return reduce(complex(data["re"], data["im"]))


def reduce(z: complex) -> CZValue:
    """
    Reduce a complex number modulo ℤ.

    Args:
        z: Any finite complex number

    Returns:
        CZValue whose representative has real part in [0, 1)

    Raises:
        LabError: ``NonFiniteValue`` for nan or infinite input
    """
    z = complex(z)
    if not cmath.isfinite(z):
        raise LabError("NonFiniteValue", f"cannot reduce {z!r}")
    re = z.real - math.floor(z.real)
    # floor of a tiny negative number leaves 1 - eps, which can round up to 1.0
    if re >= 1.0:
        re = 0.0
    return CZValue(complex(re + 0.0, z.imag))


def eq_mod_z(a: CZValue, b: CZValue, tol: TolerancePolicy | None = None) -> bool:
    """True when ``a`` and ``b`` agree in ℂ/ℤ up to the tolerance."""
    tol = tol or TolerancePolicy()
    scale = max(abs(a.rep), abs(b.rep))
    return a.distance(b) <= tol.threshold(scale)


def cz_sum(values) -> CZValue:
    """Sum of an iterable of CZValues (empty sum is [0])."""
    total = reduce(0)
    for value in values:
        total = total + value
    return total
