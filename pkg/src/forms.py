"""
Differential forms on T^k and p-indexed families of them.

A :class:`Form` is homogeneous of one degree, with components keyed by strictly
increasing axis tuples and TrigPoly coefficients. It also carries an integer
``tau_power``: the form denotes τ^tau_power · Σ f_I dt_I with τ = 2πi, which
keeps the (1/2πi)^d normalizations of regulator forms exact.

A :class:`PeriodicFamily` collects forms per integer p and realizes
DD(p) (degrees ≤ p), DD⁻(p) (degrees ≥ p) and the two-periodic DD^per.
"""

import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from src.errors import LabError
from src.fourier import (
    TAU,
    TWO_PI_I,
    Index,
    TrigPoly,
    derive,
    divide_tau,
    integrate,
    scalar,
    tau_divisible,
)

logger = logging.getLogger(__name__)

CLOSED_TOL = 1e-12

ComponentsLike = Mapping[Index, TrigPoly] | Iterable[tuple[Index, TrigPoly]]


def _sort_sign(axes: tuple[int, ...]) -> int:
    """Sign of the permutation that sorts ``axes`` (all distinct)."""
    inversions = sum(
        1 for i in range(len(axes)) for j in range(i + 1, len(axes)) if axes[i] > axes[j]
    )
    return -1 if inversions % 2 else 1


def _items(components: ComponentsLike) -> Iterable[tuple[Index, TrigPoly]]:
    if isinstance(components, Mapping):
        return components.items()
    return components


@dataclass(frozen=True)
class Form:
    """Homogeneous differential form τ^tau_power · Σ_I f_I dt_I on T^dim."""

    dim: int
    degree: int
    components: tuple[tuple[Index, TrigPoly], ...] = ()
    tau_power: int = 0

    def __post_init__(self):
        if self.degree < 0:
            raise LabError("DegreeRange", f"negative form degree {self.degree}")
        if self.components and self.degree > self.dim:
            raise LabError("DegreeRange", f"nonzero {self.degree}-form on a {self.dim}-torus")
        for axes, poly in self.components:
            if len(axes) != self.degree or list(axes) != sorted(set(axes)):
                raise LabError("BadParams", f"axes {axes} do not index a {self.degree}-form")
            if axes and not 0 <= axes[-1] < self.dim:
                raise LabError("AxisRange", f"axes {axes} on a {self.dim}-torus")
            if poly.dim != self.dim:
                raise LabError("DimMismatch", f"coefficient of dim {poly.dim} on a {self.dim}-torus")

    # --- construction -------------------------------------------------------

    @classmethod
    def build(
        cls, dim: int, degree: int, components: ComponentsLike = (), tau_power: int = 0
    ) -> "Form":
        """
        Normalize components into a canonical Form.

        Zero coefficients are dropped and common factors of τ are moved into
        ``tau_power``, so that equal forms compare equal structurally.
        """
        merged: dict[Index, TrigPoly] = {}
        for axes, poly in _items(components):
            key = tuple(int(a) for a in axes)
            merged[key] = merged[key] + poly if key in merged else poly
        comps = sorted((axes, poly) for axes, poly in merged.items() if not poly.is_zero)
        if not comps:
            return cls(dim, degree)

        while all(tau_divisible(c) for _, poly in comps for _, c in poly.terms):
            comps = [
                (axes, TrigPoly.from_coeffs({n: divide_tau(c) for n, c in poly.terms}, dim))
                for axes, poly in comps
            ]
            tau_power += 1
        return cls(dim, degree, tuple(comps), tau_power)

    @classmethod
    def zero(cls, dim: int, degree: int = 0) -> "Form":
        return cls(dim, degree)

    @classmethod
    def function(cls, f: TrigPoly) -> "Form":
        return cls.build(f.dim, 0, {(): f})

    @classmethod
    def from_poly(cls, f: TrigPoly, axes: tuple[int, ...]) -> "Form":
        return cls.build(f.dim, len(axes), {tuple(axes): f})

    @classmethod
    def dt(cls, *axes: int, dim: int = 1) -> "Form":
        """dt_{a1} ∧ … ∧ dt_{ar} (axes in any order, with the sign of sorting)."""
        if len(set(axes)) != len(axes):
            return cls(dim, len(axes))
        sign = _sort_sign(axes)
        return cls.build(dim, len(axes), {tuple(sorted(axes)): TrigPoly.constant(sign, dim)})

    # --- inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.components

    def poly(self, axes: tuple[int, ...]) -> TrigPoly:
        return dict(self.components).get(tuple(axes), TrigPoly.zero(self.dim))

    def at_tau_power(self, power: int) -> dict[Index, TrigPoly]:
        """Coefficients rescaled so that the form reads τ^power · Σ f_I dt_I."""
        if power > self.tau_power:
            raise LabError("BadParams", f"cannot lower τ-power {self.tau_power} to {power}")
        factor = TAU ** (self.tau_power - power)
        return {axes: poly.scale(factor) for axes, poly in self.components}

    def constant_part(self) -> "Form":
        comps = {
            axes: TrigPoly.constant(poly.zero_mode(), self.dim) for axes, poly in self.components
        }
        return Form.build(self.dim, self.degree, comps, self.tau_power)

    def max_abs_coefficient(self) -> float:
        """Largest numerical coefficient magnitude, τ-prefactor included."""
        prefactor = abs(TWO_PI_I**self.tau_power)
        return max(
            (abs(c) * prefactor for _, poly in self.components for c in poly.numeric[1]),
            default=0.0,
        )

    def integrate(self) -> complex:
        """∫ over T^dim; only top-degree forms contribute."""
        if self.degree != self.dim or self.is_zero:
            return 0j
        top = tuple(range(self.dim))
        return integrate(self.poly(top)) * TWO_PI_I**self.tau_power

    # --- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "Form") -> None:
        if other.dim != self.dim:
            raise LabError("DimMismatch", f"dims {self.dim} and {other.dim}")
        if other.degree != self.degree and not (self.is_zero or other.is_zero):
            raise LabError("DegreeMismatch", f"degrees {self.degree} and {other.degree}")

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        power = min(self.tau_power, other.tau_power)
        merged = list(self.at_tau_power(power).items()) + list(other.at_tau_power(power).items())
        return Form.build(self.dim, self.degree, merged, power)

    def __neg__(self) -> "Form":
        return Form(self.dim, self.degree, tuple((a, -p) for a, p in self.components), self.tau_power)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c: Any) -> "Form":
        factor = scalar(c)
        comps = [(axes, poly.scale(factor)) for axes, poly in self.components]
        return Form.build(self.dim, self.degree, comps, self.tau_power)

    def times(self, f: TrigPoly) -> "Form":
        """Multiply by a function."""
        return Form.build(
            self.dim, self.degree, [(a, p * f) for a, p in self.components], self.tau_power
        )

    def with_tau(self, k: int) -> "Form":
        """Multiply by τ^k = (2πi)^k."""
        if self.is_zero:
            return self
        return Form.build(self.dim, self.degree, self.components, self.tau_power + k)

    # --- serialization ------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        prefactor = TWO_PI_I**self.tau_power
        return {
            "dim": self.dim,
            "degree": self.degree,
            "components": [
                {"axes": list(axes), "poly": poly.scale(prefactor).to_json()}
                for axes, poly in self.components
            ],
        }


def wedge(a: Form, b: Form) -> Form:
    """Graded-commutative exterior product."""
    if a.dim != b.dim:
        raise LabError("DimMismatch", f"cannot wedge dims {a.dim} and {b.dim}")
    comps: list[tuple[Index, TrigPoly]] = []
    for axes_a, f in a.components:
        for axes_b, g in b.components:
            joined = axes_a + axes_b
            if len(set(joined)) != len(joined):
                continue
            product = f * g
            if _sort_sign(joined) < 0:
                product = -product
            comps.append((tuple(sorted(joined)), product))
    return Form.build(a.dim, a.degree + b.degree, comps, a.tau_power + b.tau_power)


def exterior_d(a: Form) -> Form:
    """de Rham differential; raises the degree by one."""
    comps: list[tuple[Index, TrigPoly]] = []
    for axes, f in a.components:
        for axis in range(a.dim):
            if axis in axes:
                continue
            df = derive(f, axis)
            if df.is_zero:
                continue
            # moving dt_axis past the smaller axes of dt_I
            if sum(1 for x in axes if x < axis) % 2:
                df = -df
            comps.append((tuple(sorted(axes + (axis,))), df))
    return Form.build(a.dim, a.degree + 1, comps, a.tau_power)


def torus_primitive(form: Form) -> Form:
    """
    A primitive g with dg = form, for a closed form without constant Fourier part.

    Mode by mode, g = (1/2πi)·Σ_n e_n ι_n ω_n / |n|², where ι_n contracts with
    the vector n; closedness of ω_n makes this exact.
    """
    if form.is_zero or form.degree == 0:
        if not form.is_zero:
            raise LabError("NotExact", "a nonzero function is never exact")
        return Form.zero(form.dim, max(form.degree - 1, 0))
    acc: dict[Index, dict[Index, Any]] = {}
    for axes, poly in form.components:
        for n, c in poly.terms:
            norm2 = sum(x * x for x in n)
            if norm2 == 0:
                raise LabError("NotExact", "constant Fourier part is not exact")
            for j, axis in enumerate(axes):
                if n[axis] == 0:
                    continue
                sub = axes[:j] + axes[j + 1 :]
                weight = scalar(Fraction((-1) ** j * n[axis], norm2))
                bucket = acc.setdefault(sub, {})
                bucket[n] = bucket.get(n, scalar(0)) + c * weight
    comps = [(sub, TrigPoly.from_coeffs(coeffs, form.dim)) for sub, coeffs in acc.items()]
    return Form.build(form.dim, form.degree - 1, comps, form.tau_power - 1)


# =============================================================================
# Periodic families
# =============================================================================


class Truncation(str, Enum):
    """Degree window of each entry p of a family."""

    NONE = "none"
    ATLEAST_P = "atleast_p"
    ATMOST_P = "atmost_p"


def _allowed(truncation: Truncation, p: int, degree: int) -> bool:
    if truncation is Truncation.ATLEAST_P:
        return degree >= p
    if truncation is Truncation.ATMOST_P:
        return degree <= p
    return True


FamilyLike = Mapping[int, Iterable[Form]] | Iterable[tuple[int, Form]]


@dataclass(frozen=True)
class PeriodicFamily:
    """Finitely supported family p ↦ (forms graded by degree)."""

    dim: int
    entries: tuple[tuple[int, tuple[Form, ...]], ...] = ()
    truncation: Truncation = Truncation.NONE

    def __post_init__(self):
        object.__setattr__(self, "truncation", Truncation(self.truncation))
        for p, forms in self.entries:
            degrees = [form.degree for form in forms]
            if degrees != sorted(set(degrees)):
                raise LabError("BadParams", f"entry {p} is not graded by distinct degrees")
            for form in forms:
                if form.dim != self.dim:
                    raise LabError("DimMismatch", f"form of dim {form.dim} in a {self.dim}-family")
                if not _allowed(self.truncation, p, form.degree):
                    raise LabError(
                        "TruncationViolated",
                        f"degree {form.degree} at p={p} under {self.truncation.value}",
                    )

    @classmethod
    def build(
        cls, dim: int, entries: FamilyLike = (), truncation: Truncation = Truncation.NONE
    ) -> "PeriodicFamily":
        """Sum forms per (p, degree), drop zeros and validate the truncation."""
        if isinstance(entries, Mapping):
            pairs = [(p, form) for p, forms in entries.items() for form in forms]
        else:
            pairs = list(entries)
        graded: dict[int, dict[int, Form]] = {}
        for p, form in pairs:
            slot = graded.setdefault(int(p), {})
            slot[form.degree] = slot[form.degree] + form if form.degree in slot else form
        normalized = []
        for p in sorted(graded):
            forms = tuple(
                graded[p][deg] for deg in sorted(graded[p]) if not graded[p][deg].is_zero
            )
            if forms:
                normalized.append((p, forms))
        return cls(dim, tuple(normalized), Truncation(truncation))

    def entry(self, p: int) -> tuple[Form, ...]:
        return dict(self.entries).get(p, ())

    def forms(self) -> Iterator[tuple[int, Form]]:
        for p, forms in self.entries:
            for form in forms:
                yield p, form

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "PeriodicFamily") -> "PeriodicFamily":
        if other.dim != self.dim:
            raise LabError("DimMismatch", f"dims {self.dim} and {other.dim}")
        if other.truncation is not self.truncation:
            raise LabError("TruncationMismatch", f"{self.truncation} + {other.truncation}")
        return PeriodicFamily.build(
            self.dim, list(self.forms()) + list(other.forms()), self.truncation
        )

    def __neg__(self) -> "PeriodicFamily":
        return self.scale(-1)

    def __sub__(self, other: "PeriodicFamily") -> "PeriodicFamily":
        return self + (-other)

    def scale(self, c: Any) -> "PeriodicFamily":
        return PeriodicFamily.build(
            self.dim, [(p, form.scale(c)) for p, form in self.forms()], self.truncation
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "truncation": self.truncation.value,
            "entries": [
                {"p": p, "forms": [form.to_json() for form in forms]} for p, forms in self.entries
            ],
        }


@dataclass(frozen=True)
class HPClass:
    """Periodic cohomology class held by a closed, untruncated representative."""

    rep: PeriodicFamily

    def __post_init__(self):
        residual = closedness_residual(self.rep)
        if residual > CLOSED_TOL:
            raise LabError("NotClosed", f"representative has d-residual {residual:.3e}")


def closedness_residual(fam: PeriodicFamily) -> float:
    return max((exterior_d(form).max_abs_coefficient() for _, form in fam.forms()), default=0.0)


def is_closed(fam: PeriodicFamily, tol: float = CLOSED_TOL) -> bool:
    return closedness_residual(fam) <= tol


def integrate_family(fam: PeriodicFamily) -> complex:
    """Σ_p ∫ of the top-degree component of entry p."""
    return sum((form.integrate() for _, form in fam.forms()), 0j)


def shift(fam: PeriodicFamily, two_k: int) -> PeriodicFamily:
    """Periodicity shift ι_{2k}: entry p of the result is entry p − k of ``fam``."""
    if two_k % 2:
        raise LabError("OddShift", f"shift by {two_k} is not even")
    if two_k == 0:
        return fam
    if fam.truncation is not Truncation.NONE:
        raise LabError("TruncationMismatch", "the shift acts on untruncated families")
    k = two_k // 2
    return PeriodicFamily.build(fam.dim, [(p + k, form) for p, form in fam.forms()])


def psi_project(fam: PeriodicFamily) -> PeriodicFamily:
    """Projection DD^per → DD: keep degrees ≤ p in entry p."""
    if fam.truncation is not Truncation.NONE:
        raise LabError("TruncationMismatch", f"psi_project expects none, got {fam.truncation}")
    kept = [(p, form) for p, form in fam.forms() if form.degree <= p]
    return PeriodicFamily.build(fam.dim, kept, Truncation.ATMOST_P)


def dd_differential(fam: PeriodicFamily) -> PeriodicFamily:
    """de Rham differential entrywise, respecting the family's truncation."""
    images = []
    for p, form in fam.forms():
        image = exterior_d(form)
        if image.is_zero or not _allowed(fam.truncation, p, image.degree):
            continue
        images.append((p, image))
    return PeriodicFamily.build(fam.dim, images, fam.truncation)


def family_wedge(a: PeriodicFamily, b: PeriodicFamily) -> PeriodicFamily:
    """Product of families, entry p+q collecting a(p) ∧ b(q)."""
    if a.dim != b.dim:
        raise LabError("DimMismatch", f"dims {a.dim} and {b.dim}")
    truncation = a.truncation if a.truncation is b.truncation else Truncation.NONE
    products = []
    for p, fa in a.forms():
        for q, fb in b.forms():
            product = wedge(fa, fb)
            if not product.is_zero:
                products.append((p + q, product))
    return PeriodicFamily.build(a.dim, products, truncation)


def hp_representative(fam: PeriodicFamily) -> HPClass:
    """
    Harmonic (constant-coefficient) representative of a closed family.

    Args:
        fam: Family of closed forms, any truncation

    Returns:
        HPClass whose forms keep only the constant Fourier part

    Raises:
        LabError: ``NotClosed`` if some form is not closed; ``NotExact`` if the
            removed part fails the primitive check
    """
    residual = closedness_residual(fam)
    if residual > CLOSED_TOL:
        raise LabError("NotClosed", f"d-residual {residual:.3e} exceeds {CLOSED_TOL}")

    harmonic = []
    for p, form in fam.forms():
        constant = form.constant_part()
        difference = form - constant
        if not difference.is_zero:
            primitive = torus_primitive(difference)
            if exterior_d(primitive) != difference:
                raise LabError("NotExact", f"primitive check failed at p={p}")
        harmonic.append((p, constant))
    return HPClass(PeriodicFamily.build(fam.dim, harmonic))
