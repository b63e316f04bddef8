"""
Regulator forms of product classes and their ℂ/ℤ evaluation.

A product class ι(exp f) ∪ ι(u₂) ∪ … ∪ ι(u_d) on T^k has regulator form
(1/(2πi)^d) · f · dlog u₂ ∧ … ∧ dlog u_d, the fiber integral over I of the
curvature of the homotopy exp(t·f). On a (d−1)-dimensional torus the form is of
top degree and integrates to σ_d of the class.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from src.cz import CZValue, cz_sum, reduce
from src.errors import LabError
from src.forms import Form, exterior_d, wedge
from src.fourier import TAU, TrigPoly, UnitFunction, derive

logger = logging.getLogger(__name__)

# Flat restriction on the non-bounding spin circle acts as [z] -> [-z].
CIRCLE_FLAT_SIGN = -1


@dataclass(frozen=True)
class ProductClass:
    """The class ι(exp f) ∪ ι(u₂) ∪ … ∪ ι(u_d)."""

    expfactor: TrigPoly
    unitfactors: tuple[UnitFunction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "unitfactors", tuple(self.unitfactors))
        for u in self.unitfactors:
            if u.dim != self.expfactor.dim:
                raise LabError("DimMismatch", f"unit on T^{u.dim}, exp factor on T^{self.dim}")
        if self.dim > self.d - 1:
            raise LabError(
                "DimensionConstraint", f"dim {self.dim} exceeds d - 1 = {self.d - 1}"
            )

    @property
    def d(self) -> int:
        return 1 + len(self.unitfactors)

    @property
    def dim(self) -> int:
        return self.expfactor.dim

    def to_json(self) -> dict[str, Any]:
        return {"f": self.expfactor.to_json(), "units": [u.to_json() for u in self.unitfactors]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ProductClass":
        return cls(
            TrigPoly.from_json(data["f"]),
            tuple(UnitFunction.from_json(u) for u in data.get("units", [])),
        )


def dlog_form(u: UnitFunction) -> Form:
    """d log u = 2πi·⟨w, dt⟩ + dg as an exact 1-form."""
    comps = []
    for axis, w in enumerate(u.winding):
        coeff = TrigPoly.constant(TAU * w, u.dim) + derive(u.logpart, axis)
        comps.append(((axis,), coeff))
    return Form.build(u.dim, 1, comps)


def reg_unit(u: UnitFunction) -> Form:
    """Regulator of ι(u): (1/2πi)·d log u."""
    return dlog_form(u).with_tau(-1)


def _product_form(f: TrigPoly, units: Iterable[UnitFunction]) -> Form:
    units = tuple(units)
    form = Form.function(f)
    for u in units:
        form = wedge(form, dlog_form(u))
    return form.with_tau(-(1 + len(units)))


def reg_product_form(x: ProductClass) -> Form:
    """(1/(2πi)^d) · f · d log u₂ ∧ … ∧ d log u_d."""
    return _product_form(x.expfactor, x.unitfactors)


def curvature_form(x: ProductClass) -> Form:
    """Curvature (1/(2πi)^d) df ∧ d log u₂ ∧ … of the class."""
    return exterior_d(reg_product_form(x))


def is_flat(x: ProductClass) -> bool:
    return curvature_form(x).is_zero


@dataclass(frozen=True)
class CylinderCurvature:
    """
    Curvature of the homotopy exp(t·f) on I × T^k, written dt∧A + t·B.

    ``dt_part`` is A and ``t_part`` is B, both forms on the torus.
    """

    dt_part: Form
    t_part: Form

    def fiber_integral(self) -> Form:
        """∫_I over the interval factor; only dt∧A contributes."""
        return self.dt_part

    def is_closed(self) -> bool:
        # d(dt∧A + tB) = dt∧(B − dA) + t·dB
        return self.t_part == exterior_d(self.dt_part) and exterior_d(self.t_part).is_zero


def transgression_on_cylinder(x: ProductClass) -> CylinderCurvature:
    """Split (1/(2πi)^d)(f dt + t df) ∧ d log u₂ ∧ … into its dt and t parts."""
    dlogs = [dlog_form(u) for u in x.unitfactors]
    dt_part = Form.function(x.expfactor)
    t_part = exterior_d(Form.function(x.expfactor))
    for dlog in dlogs:
        dt_part = wedge(dt_part, dlog)
        t_part = wedge(t_part, dlog)
    return CylinderCurvature(dt_part.with_tau(-x.d), t_part.with_tau(-x.d))


def sigma_eval(x: ProductClass) -> CZValue:
    """
    σ_d of a product class on a (d−1)-torus.

    Raises:
        LabError: ``DimensionMismatchForEvaluation`` unless dim = d − 1
    """
    if x.dim != x.d - 1:
        raise LabError(
            "DimensionMismatchForEvaluation", f"need dim = d - 1, got dim {x.dim}, d {x.d}"
        )
    value = reduce(reg_product_form(x).integrate())
    logger.debug("sigma_%d = %s", x.d, value.rep)
    return value


def sigma_eval_sum(classes: Iterable[ProductClass]) -> CZValue:
    """σ_d of a sum of product classes."""
    return cz_sum(sigma_eval(x) for x in classes)


def sigma_vanishing_extra_factor(f: TrigPoly, units: Iterable[UnitFunction]) -> Form:
    """
    Regulator form of a class with dim + 1 unit factors, which must vanish.

    Raises:
        LabError: ``PreconditionFailed`` unless there are dim + 1 units;
            ``VanishingViolated`` if the form is nonzero
    """
    units = tuple(units)
    if len(units) != f.dim + 1:
        raise LabError("PreconditionFailed", f"need {f.dim + 1} unit factors, got {len(units)}")
    form = _product_form(f, units)
    if not form.is_zero:
        raise LabError("VanishingViolated", f"{form.degree}-form on T^{f.dim} is nonzero")
    return form


def r_dirac_compose(
    sigma: CZValue, orientation_sign: int = 1, flat_sign: int = CIRCLE_FLAT_SIGN
) -> CZValue:
    """Apply the circle's flat evaluation [z] ↦ [orientation · flat · z]."""
    if orientation_sign not in (1, -1) or flat_sign not in (1, -1):
        raise LabError("BadParams", f"signs must be ±1, got {orientation_sign}, {flat_sign}")
    return reduce(orientation_sign * flat_sign * sigma.rep)
