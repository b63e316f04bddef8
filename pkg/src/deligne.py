"""
Čech–Deligne cohomology of the circle over finite arc covers.

A unit u = e^{2πiwt}·e^{g} gives the degree-1 class with local logarithms
L_i = (1/2πi) log u on each arc and integer transitions L_{i−1} − L_i on the
overlaps. The cup product of (L, n) and (M, m) is the degree-2 cochain

    ω_i = L_i dM_i,        f_{i−1,i} = n_{i−1,i} · M_i,

which satisfies df_{i−1,i} = ω_{i−1} − ω_i. Its evaluation on [S¹] is

    Σ_i ∫_{t_i}^{t_{i+1}} ω_i − Σ_i f_{i−1,i}(t_i)   mod ℤ,

independent of the cut points t_i and, mod ℤ, of the integer branch offsets of
L and M. Arc i is lifted to [t_i − ε, t_{i+1} + ε] with t_m = t_0 + 1 and carries
the principal branch of log u at its midpoint, so the winding is spread over the
overlaps where that branch jumps.
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.cz import CZValue, reduce
from src.errors import LabError
from src.fourier import TWO_PI_I, TrigPoly, UnitFunction, derive, integrate, mul, to_complex

logger = logging.getLogger(__name__)

COCYCLE_TOL = 1e-10
CUP_TOL = 1e-9


@dataclass(frozen=True)
class ArcCover:
    """Good cover of S¹ by m arcs cut at ``cuts``, consecutive overlaps only."""

    cuts: tuple[float, ...]

    def __post_init__(self):
        cuts = tuple(float(t) for t in self.cuts)
        if len(cuts) < 3:
            raise LabError("BadCover", f"need at least 3 arcs, got {len(cuts)}")
        if any(not 0.0 <= t < 1.0 for t in cuts):
            raise LabError("BadCover", f"cut points must lie in [0, 1): {cuts}")
        if any(b <= a for a, b in zip(cuts, cuts[1:], strict=False)):
            raise LabError("BadCover", f"cut points must increase strictly: {cuts}")
        object.__setattr__(self, "cuts", cuts)

    @classmethod
    def uniform(cls, m: int, start: float = 0.0) -> "ArcCover":
        return cls(tuple(sorted((start + i / m) % 1.0 for i in range(m))))

    @property
    def m(self) -> int:
        return len(self.cuts)

    def endpoint(self, i: int) -> float:
        """Lifted right end t_{i+1} of arc i (t_m = t_0 + 1)."""
        return self.cuts[i + 1] if i + 1 < self.m else self.cuts[0] + 1.0

    @property
    def epsilon(self) -> float:
        """Overlap half-width: a quarter of the smallest gap."""
        return min(self.endpoint(i) - self.cuts[i] for i in range(self.m)) / 4

    def refine(self) -> "ArcCover":
        """Cover with every arc split at its midpoint."""
        midpoints = [((self.cuts[i] + self.endpoint(i)) / 2) % 1.0 for i in range(self.m)]
        return ArcCover(tuple(sorted(self.cuts + tuple(midpoints))))

    def overlap_points(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Sample points of the overlap at t_i, lifted for arcs i−1 and i."""
        s = self.cuts[i] + self.epsilon * np.array([-0.5, 0.0, 0.5])
        previous = s + 1.0 if i == 0 else s
        return previous, s

    def to_json(self) -> dict[str, Any]:
        return {"m": self.m, "cuts": list(self.cuts)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ArcCover":
        cover = cls(tuple(data["cuts"]))
        if "m" in data and int(data["m"]) != cover.m:
            raise LabError("BadCover", f"m={data['m']} but {cover.m} cuts")
        return cover


@dataclass(frozen=True)
class LocalLog:
    """L(s) = w·s + g(s)/(2πi) + offset on a lifted arc, with an integer offset."""

    winding: int
    logpart: TrigPoly
    offset: int = 0

    def __call__(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self.winding * s + self.logpart.evaluate(s) / TWO_PI_I + self.offset

    def derivative(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self.winding + derive(self.logpart).evaluate(s) / TWO_PI_I


@dataclass(frozen=True)
class DeligneH1:
    """
    Degree-1 Deligne cocycle: local logs per arc and transitions n_{i−1,i}.

    ``transitions[i]`` is L_{i−1} − L_i on the overlap at t_i.
    """

    cover: ArcCover
    logs: tuple[LocalLog, ...]
    transitions: tuple[int, ...]

    def __post_init__(self):
        if len(self.logs) != self.cover.m or len(self.transitions) != self.cover.m:
            raise LabError("CoverMismatch", f"{len(self.logs)} logs on {self.cover.m} arcs")
        residual = self.residual()
        if residual > COCYCLE_TOL:
            raise LabError("NotACocycle", f"overlap residual {residual:.3e}")

    def residual(self) -> float:
        worst = 0.0
        for i in range(self.cover.m):
            previous, current = self.cover.overlap_points(i)
            diff = self.logs[i - 1](previous) - self.logs[i](current) - self.transitions[i]
            worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    @property
    def winding(self) -> int:
        return sum(self.transitions)


def unit_to_deligne(u: UnitFunction, cover: ArcCover) -> DeligneH1:
    """
    Deligne class of a unit on the circle.

    Arc i gets the branch w·s + g(s)/(2πi) + k_i whose real part at the arc
    midpoint lies in (−1/2, 1/2], i.e. (1/2πi) times the principal log of u there.
    The transitions n_i = k_{i−1} − k_i (plus w at t_0, where the lift jumps)
    then sum to the winding.
    """
    if u.dim != 1:
        raise LabError("DimMismatch", "Deligne classes are built on the circle")
    w = u.winding[0]
    base = LocalLog(w, u.logpart)
    offsets = []
    for i in range(cover.m):
        mid = (cover.cuts[i] + cover.endpoint(i)) / 2
        offsets.append(-math.ceil(float(np.real(base(np.array([mid]))[0])) - 0.5))
    logs = tuple(LocalLog(w, u.logpart, k) for k in offsets)
    transitions = tuple(
        offsets[i - 1] - offsets[i] + (w if i == 0 else 0) for i in range(cover.m)
    )
    logger.debug("Branch offsets %s, transitions %s", offsets, transitions)
    return DeligneH1(cover, logs, transitions)


@dataclass(frozen=True)
class DeligneH2:
    """
    Degree-2 cocycle (ω_i = L_i dM_i, f_{i−1,i} = n_{i−1,i}·M_i); no triple overlaps on S¹.
    """

    cover: ArcCover
    forms: tuple[tuple[LocalLog, LocalLog], ...]
    transitions: tuple[int, ...]

    def omega(self, i: int, s: np.ndarray) -> np.ndarray:
        left, right = self.forms[i]
        return left(s) * right.derivative(s)

    def overlap_function(self, i: int, s: np.ndarray) -> np.ndarray:
        return self.transitions[i] * self.forms[i][1](s)

    def residual(self) -> float:
        """Largest |df_{i−1,i} − (ω_{i−1} − ω_i)| at the overlap samples."""
        worst = 0.0
        for i in range(self.cover.m):
            previous, current = self.cover.overlap_points(i)
            df = self.transitions[i] * self.forms[i][1].derivative(current)
            diff = df - (self.omega(i - 1, previous) - self.omega(i, current))
            worst = max(worst, float(np.max(np.abs(diff))))
        return worst


def cup(x: DeligneH1, y: DeligneH1) -> DeligneH2:
    """
    Cup product of degree-1 classes.

    Raises:
        LabError: ``CoverMismatch`` or ``NotACocycle``
    """
    if x.cover != y.cover:
        raise LabError("CoverMismatch", "cup product needs a common cover")
    product = DeligneH2(x.cover, tuple(zip(x.logs, y.logs, strict=True)), x.transitions)
    residual = product.residual()
    if residual > CUP_TOL:
        raise LabError("NotACocycle", f"cup residual {residual:.3e}")
    return product


def _quadrature_nodes(c: DeligneH2) -> int:
    degree = max(left.logpart.degree + right.logpart.degree for left, right in c.forms)
    return 32 + 4 * degree


def evaluate(c: DeligneH2) -> CZValue:
    """
    ⟨c, [S¹]⟩ ∈ ℂ/ℤ by Gauss–Legendre quadrature on each lifted arc.

    Raises:
        LabError: ``NotACocycle`` if the cochain residuals exceed the tolerance
    """
    residual = c.residual()
    if residual > CUP_TOL:
        raise LabError("NotACocycle", f"cochain residual {residual:.3e}")
    nodes, weights = leggauss(_quadrature_nodes(c))
    total = 0j
    for i in range(c.cover.m):
        a, b = c.cover.cuts[i], c.cover.endpoint(i)
        s = (b - a) / 2 * nodes + (a + b) / 2
        total += (b - a) / 2 * complex(np.dot(weights, c.omega(i, s)))
        total -= complex(c.overlap_function(i, np.array([c.cover.cuts[i]]))[0])
    logger.debug("Deligne evaluation on %d arcs: %s", c.cover.m, total)
    return reduce(total)


def pairing_closed_form(u1: UnitFunction, u2: UnitFunction) -> CZValue:
    """
    ⟨u₁ ∪ u₂, [S¹]⟩ for u₁ = e^{2πiat}e^{g}, u₂ = e^{2πibt}e^{h}.

    Equals [ab/2 + (b·ĝ₀ − a·ĥ₀)/(2πi) + (1/(2πi)²)∫ g dh]; for a = 0 this is
    [(1/(2πi)²)∫ g d log u₂].
    """
    return reduce(_closed_form_value(u1, u2))


def _closed_form_value(u1: UnitFunction, u2: UnitFunction) -> complex:
    if u1.dim != 1 or u2.dim != 1:
        raise LabError("DimMismatch", "the pairing lives on the circle")
    a, b = u1.winding[0], u2.winding[0]
    g, h = u1.logpart, u2.logpart
    g0, h0 = to_complex(g.zero_mode()), to_complex(h.zero_mode())
    return a * b / 2 + (b * g0 - a * h0) / TWO_PI_I + integrate(mul(g, derive(h))) / TWO_PI_I**2


def pairing_cech(u1: UnitFunction, u2: UnitFunction, cover: ArcCover | None = None) -> CZValue:
    """The same pairing through unit_to_deligne, cup and evaluate."""
    cover = cover or ArcCover.uniform(4)
    return evaluate(cup(unit_to_deligne(u1, cover), unit_to_deligne(u2, cover)))


def antisymmetry_defect(u1: UnitFunction, u2: UnitFunction) -> int:
    """
    ⟨u₁∪u₂⟩ + ⟨u₂∪u₁⟩ before reduction mod ℤ, summed over both cup orders.

    For this cup convention the sum is the integer a·b.

    Raises:
        LabError: ``NotACocycle`` if the sum is not an integer
    """
    total = _closed_form_value(u1, u2) + _closed_form_value(u2, u1)
    nearest = round(total.real)
    if abs(total - nearest) > CUP_TOL * (1.0 + abs(total)):
        raise LabError("NotACocycle", f"antisymmetry defect {total} is not an integer")
    return int(nearest)


def random_cover(rng: np.random.Generator, m: int) -> ArcCover:
    """Cover with m cut points drawn at random, kept apart from each other."""
    base = np.sort(rng.uniform(0.0, 1.0, size=m))
    jitter = (np.arange(m) + 0.5 * base) / m
    return ArcCover(tuple(float(t) for t in np.sort(jitter % 1.0)))
