"""
Registry of named verification scenarios.

Each scenario checks one identity of the lab end to end and returns report rows
plus the constants it measured. Scenarios are registered with :func:`scenario`
together with a pydantic schema for their parameters; randomized inputs come
from a generator seeded by the lab seed and the scenario name, so reruns give
identical numbers.
"""

import itertools
import logging
import math
import zlib
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.cocycle import CocycleConstants, b_dirac, cochain_a_terms, compare_ab, phi_d_eval
from src.cyclic import (
    ChainLayout,
    CyclicChain,
    LambdaChain,
    boundary_b,
    pi_d_iso,
    pi_dd,
    pi_minus,
    total_differential,
)
from src.cz import CZValue, TolerancePolicy, reduce
from src.deligne import antisymmetry_defect, pairing_cech, pairing_closed_form, random_cover
from src.dirac import CircleDirac, GradedBundle, eta_xi_closed, eta_zeta_oracle, rho_dirac
from src.errors import LabError
from src.forms import (
    Form,
    PeriodicFamily,
    dd_differential,
    exterior_d,
    hp_representative,
    integrate_family,
    psi_project,
    shift,
    wedge,
)
from src.fourier import TWO_PI_I, TrigPoly, UnitFunction, to_complex
from src.operators import WindowSpec, det_mult_commutator, toeplitz_index
from src.regulator import (
    CIRCLE_FLAT_SIGN,
    ProductClass,
    curvature_form,
    r_dirac_compose,
    reg_product_form,
    reg_unit,
    sigma_eval,
    sigma_vanishing_extra_factor,
    transgression_on_cylinder,
)
from src.reports import ReportRow, make_cz_row, make_row

logger = logging.getLogger(__name__)


class ScenarioKind(str, Enum):
    """Which default tolerance a scenario is judged by."""

    EXACT = "exact"
    TRUNCATION = "truncation"


class ScenarioParams(BaseModel):
    """Base schema: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")


@dataclass(frozen=True)
class RunContext:
    """Resolved run settings handed to a scenario."""

    name: str
    windows: tuple[int, ...]
    guard: int
    tolerance: TolerancePolicy
    seed: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(self.name.encode())])

    def window(self, N: int, guard: int | None = None) -> WindowSpec:
        guard = self.guard if guard is None else guard
        return WindowSpec(N, min(guard, N - 1))

    def row(self, label: str, lhs: complex, rhs: complex, N: int | None = None) -> ReportRow:
        return make_row(label, lhs, rhs, self.tolerance, N=N)

    def cz_row(self, label: str, lhs: CZValue, rhs: CZValue, N: int | None = None) -> ReportRow:
        return make_cz_row(label, lhs, rhs, self.tolerance, N=N)


@dataclass
class ScenarioOutcome:
    rows: list[ReportRow] = field(default_factory=list)
    constants: dict[str, Any] = field(default_factory=dict)


Runner = Callable[[Any, RunContext], ScenarioOutcome]


@dataclass(frozen=True)
class ScenarioSpec:
    """A registered scenario."""

    name: str
    params_model: type[ScenarioParams]
    runner: Runner
    kind: ScenarioKind
    windowed: bool = False
    default_windows: tuple[int, ...] | None = None
    description: str = ""

    def parse_params(self, raw: dict[str, Any] | None) -> ScenarioParams:
        """
        Validate raw parameters against the scenario schema.

        Raises:
            LabError: ``BadParams`` on a schema violation
        """
        try:
            return self.params_model.model_validate(raw or {})
        except ValidationError as e:
            raise LabError("BadParams", f"{self.name}: {e}") from e

    def default_params(self) -> dict[str, Any]:
        return self.params_model().model_dump(mode="json")


SCENARIOS: dict[str, ScenarioSpec] = {}


def scenario(
    name: str,
    params: type[ScenarioParams],
    kind: ScenarioKind = ScenarioKind.EXACT,
    windowed: bool = False,
    windows: tuple[int, ...] | None = None,
) -> Callable[[Runner], Runner]:
    """Register a scenario runner under ``name``."""

    def decorator(runner: Runner) -> Runner:
        if name in SCENARIOS:
            raise LabError("BadConfig", f"scenario {name!r} registered twice")
        doc = (runner.__doc__ or "").strip().splitlines()
        SCENARIOS[name] = ScenarioSpec(
            name=name,
            params_model=params,
            runner=runner,
            kind=kind,
            windowed=windowed,
            default_windows=windows,
            description=doc[0] if doc else "",
        )
        return runner

    return decorator


def get_scenario(name: str) -> ScenarioSpec:
    """
    Look up a registered scenario.

    Raises:
        LabError: ``UnknownScenario`` for an unregistered name
    """
    try:
        return SCENARIOS[name]
    except KeyError:
        raise LabError("UnknownScenario", f"{name!r}; known: {', '.join(sorted(SCENARIOS))}") from None


# =============================================================================
# Random inputs
# =============================================================================


def random_poly(
    rng: np.random.Generator, degree: int, amplitude: float, dim: int = 1, zero_mode: bool = True
) -> TrigPoly:
    """Trigonometric polynomial with coefficients uniform in the complex square of side 2·amplitude."""
    coeffs = {}
    for n in itertools.product(range(-degree, degree + 1), repeat=dim):
        if not zero_mode and not any(n):
            continue
        re, im = rng.uniform(-amplitude, amplitude, size=2)
        coeffs[n] = complex(re, im)
    return TrigPoly.from_coeffs(coeffs, dim)


def random_gaussian_poly(rng: np.random.Generator, degree: int, bound: int, dim: int = 1) -> TrigPoly:
    """Trigonometric polynomial with Gaussian-integer coefficients."""
    coeffs = {}
    for n in itertools.product(range(-degree, degree + 1), repeat=dim):
        re, im = rng.integers(-bound, bound + 1, size=2)
        coeffs[n] = complex(int(re), int(im))
    return TrigPoly.from_coeffs(coeffs, dim)


def random_word(rng: np.random.Generator, length: int, max_letter: int, dim: int = 1):
    return tuple(
        tuple(int(x) for x in rng.integers(-max_letter, max_letter + 1, size=dim))
        for _ in range(length)
    )


def random_balanced_word(rng: np.random.Generator, length: int, max_letter: int, dim: int = 1):
    """Random word whose letters sum to zero: the last letter cancels the others."""
    head = random_word(rng, length - 1, max_letter, dim)
    last = tuple(-sum(letter[axis] for letter in head) for axis in range(dim))
    return head + (last,)


def random_gaussian(rng: np.random.Generator, bound: int = 3) -> complex:
    re, im = rng.integers(-bound, bound + 1, size=2)
    value = complex(int(re), int(im))
    return value if value else 1 + 0j


def _family_size(fam: PeriodicFamily) -> float:
    return max((form.max_abs_coefficient() for _, form in fam.forms()), default=0.0)


def _chain_size(chain: LambdaChain) -> float:
    return max((abs(to_complex(c)) for _, c in chain.terms), default=0.0)


# =============================================================================
# Spectral invariants
# =============================================================================


class EtaParams(ScenarioParams):
    thetas: list[float] = Field(
        default_factory=lambda: [
            math.pi / 6,
            math.pi / 3,
            math.pi / 2,
            math.pi,
            3 * math.pi / 2,
            5 * math.pi / 3,
        ]
    )


@scenario("eta_closed_vs_zeta", EtaParams)
def eta_closed_vs_zeta(params: EtaParams, ctx: RunContext) -> ScenarioOutcome:
    """Closed-form eta invariant 1 − θ/π against the Hurwitz-zeta value at s = 0."""
    out = ScenarioOutcome()
    for theta in params.thetas:
        if not 0 <= theta < 2 * math.pi:
            raise LabError("BadParams", f"theta must lie in [0, 2π), got {theta}")
        D = CircleDirac.from_theta(theta)
        eta, _ = eta_xi_closed(D)
        out.rows.append(ctx.row(f"eta[theta={theta:.6f}]", eta, eta_zeta_oracle(D)))
    return out


class RhoParams(ScenarioParams):
    thetas: list[float] = Field(
        default_factory=lambda: [0.0, math.pi / 2, math.pi / 3, math.pi, 4 * math.pi / 3]
    )
    windings: list[int] = Field(default_factory=lambda: [-2, 1, 3])
    gamma_constant: float = 0.25


def _expected_xi(theta: float) -> CZValue:
    if theta == 0.0:
        return reduce(0.5)
    return reduce(0.5 - theta / (2 * math.pi))


@scenario("rho_flat_line_bundle", RhoParams)
def rho_flat_line_bundle(params: RhoParams, ctx: RunContext) -> ScenarioOutcome:
    """ρ of flat line bundles on the circle: values, graded cancellation, γ-dependence."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    for theta in params.thetas:
        v = CircleDirac.from_theta(theta).holonomy
        line = GradedBundle.line(v)
        label = f"theta={theta:.6f}"
        out.rows.append(ctx.cz_row(f"rho_line[{label}]", rho_dirac(line), _expected_xi(theta)))
        cancelled = rho_dirac(line + GradedBundle.line(v, -1))
        out.rows.append(ctx.cz_row(f"graded_cancellation[{label}]", cancelled, reduce(0)))

    a, b = (CircleDirac.from_theta(t).holonomy for t in rng.uniform(0.1, 6.2, size=2))
    sum_bundle = GradedBundle.line(a) + GradedBundle.line(b, -1)
    out.rows.append(
        ctx.cz_row(
            "additivity",
            rho_dirac(sum_bundle),
            rho_dirac(GradedBundle.line(a)) - rho_dirac(GradedBundle.line(b)),
        )
    )

    trivial = GradedBundle.line(1.0)
    for w in params.windings:
        u = UnitFunction((w,), random_poly(rng, 2, 0.2, zero_mode=False))
        gamma = PeriodicFamily.build(1, [(0, reg_unit(u))])
        out.rows.append(
            ctx.cz_row(f"integral_gamma_invisible[w={w}]", rho_dirac(trivial, gamma), rho_dirac(trivial))
        )
    c = params.gamma_constant
    gamma = PeriodicFamily.build(1, [(0, Form.dt(0).scale(c))])
    out.rows.append(ctx.cz_row(f"gamma_shift[c={c}]", rho_dirac(trivial, gamma), reduce(0.5 + c)))
    return out


class IndexParams(ScenarioParams):
    windings: list[int] = Field(default_factory=lambda: [-3, -2, -1, 1, 2, 3])
    degree: int = Field(default=4, ge=0)
    amplitude: float = Field(default=0.03, ge=0.0)
    guard: int = Field(default=48, ge=1)


@scenario("toeplitz_index_vs_winding", IndexParams, windowed=True)
def toeplitz_index_vs_winding(params: IndexParams, ctx: RunContext) -> ScenarioOutcome:
    """Numerical index of T_u against −winding(u) for perturbed characters."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    units = [
        UnitFunction((w,), random_poly(rng, params.degree, params.amplitude, zero_mode=False))
        for w in params.windings
    ]
    for N in ctx.windows:
        w = ctx.window(N, params.guard)
        for u in units:
            index = toeplitz_index(u, w)
            out.rows.append(ctx.row(f"index[w={u.winding[0]}]", index, -u.winding[0], N=N))
    out.constants["index_sign"] = -1
    return out


# =============================================================================
# Cocycles
# =============================================================================


class CocycleParams(ScenarioParams):
    m_max: int = Field(default=8, ge=1)
    random_count: int = Field(default=10, ge=0)
    degree: int = Field(default=4, ge=1)
    guard: int = Field(default=64, ge=1)


@scenario("cocycle_ab_comparison", CocycleParams, windowed=True, windows=(256, 512))
def cocycle_ab_comparison(params: CocycleParams, ctx: RunContext) -> ScenarioOutcome:
    """Constant relating the Fredholm-module cochain to the form-side cochain."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    const = CocycleConstants.for_degree(1)
    cycles = [
        LambdaChain.from_tensor([([TrigPoly.character(-m), TrigPoly.character(m)], 1)])
        for m in range(1, params.m_max + 1)
    ]
    for _ in range(params.random_count):
        f0 = random_gaussian_poly(rng, params.degree, 3)
        f1 = random_gaussian_poly(rng, params.degree, 3)
        cycles.append(LambdaChain.from_tensor([([f0, f1], 1)]))

    windows = [ctx.window(N, params.guard) for N in ctx.windows]
    comparison = compare_ab(cycles, windows, const)
    for row in comparison.windows:
        out.rows.append(ctx.row("kappa_spread", row.kappa_spread, 0.0, N=row.N))
    kappa = complex(comparison.kappa_re, comparison.kappa_im)
    last = windows[-1].N
    out.rows.append(ctx.row("kappa_drift", comparison.kappa_drift, 0.0, N=last))
    out.rows.append(ctx.row("kappa_vs_trace_value", kappa, 4 * const.c_a / TWO_PI_I, N=last))

    phi = phi_d_eval(
        [b_dirac(TrigPoly.character(-1), windows[0]), b_dirac(TrigPoly.character(1), windows[0])],
        const,
    )
    out.rows.append(ctx.row("phi1_character_pair", phi, -const.c_phi, N=windows[0].N))

    out.constants.update(
        kappa_re=comparison.kappa_re,
        kappa_im=comparison.kappa_im,
        kappa_spread=comparison.kappa_spread,
        kappa_drift=comparison.kappa_drift,
        deviation_from_one=comparison.deviation_from_one,
        c_phi_re=const.c_phi.real,
        c_a_re=const.c_a.real,
        cycles_used=comparison.windows[-1].cycles_used,
    )
    logger.debug("cocycle_ab_comparison: kappa=%s", kappa)
    return out


NONZERO_TRACE = 1e-6


class BoundaryParams(ScenarioParams):
    count: int = Field(default=20, ge=1)
    terms: int = Field(default=3, ge=1)
    max_letter: int = Field(default=4, ge=1)
    guard: int = Field(default=64, ge=1)


@scenario("boundary_annihilation", BoundaryParams, windowed=True, windows=(512,))
def boundary_annihilation(params: BoundaryParams, ctx: RunContext) -> ScenarioOutcome:
    """
    The Fredholm-module cochain vanishes on boundaries b(c), c ∈ C^λ₂.

    Words of c sum to zero in Fourier degree, so the words of b(c) carry nonzero
    traces that cancel only in the sum.
    """
    out = ScenarioOutcome()
    rng = ctx.rng()
    const = CocycleConstants.for_degree(1)
    chains = [
        LambdaChain.build(
            2,
            1,
            [
                (random_balanced_word(rng, 3, params.max_letter), random_gaussian(rng))
                for _ in range(params.terms)
            ],
        )
        for _ in range(params.count)
    ]
    for N in ctx.windows:
        w = ctx.window(N, params.guard)
        nonzero = 0
        for i, c in enumerate(chains):
            terms = cochain_a_terms(boundary_b(c), w, const)
            scale = max(
                (
                    abs(to_complex(coeff)) * math.prod(1 + abs(letter[0]) for letter in word)
                    for word, coeff in c.terms
                ),
                default=1.0,
            )
            if max((abs(t) for t in terms), default=0.0) > NONZERO_TRACE * scale:
                nonzero += 1
            value = sum(terms, 0j)
            out.rows.append(ctx.row(f"cochain_a_on_boundary[{i}]", abs(value) / scale, 0.0, N=N))
        out.rows.append(ctx.row("boundary_traces_nonzero", float(nonzero > 0), 1.0, N=N))
        out.constants[f"nonzero_trace_chains[N={N}]"] = nonzero
    logger.debug("boundary_annihilation: %s", out.constants)
    return out


# =============================================================================
# Determinants, regulators and Deligne pairings
# =============================================================================


class DeterminantParams(ScenarioParams):
    count: int = Field(default=4, ge=0)
    degree: int = Field(default=4, ge=1)
    amplitude: float = Field(default=0.05, ge=0.0)
    guard: int = Field(default=64, ge=1)
    reference_pair: bool = True


REFERENCE_G1 = {1: 0.3}
REFERENCE_G2 = {-1: 0.3}


@scenario(
    "determinant_vs_deligne",
    DeterminantParams,
    kind=ScenarioKind.TRUNCATION,
    windowed=True,
    windows=(128, 256),
)
def determinant_vs_deligne(params: DeterminantParams, ctx: RunContext) -> ScenarioOutcome:
    """det of the Toeplitz multiplicative commutator against exp of the Deligne pairing."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    pairs = []
    if params.reference_pair:
        pairs.append((TrigPoly.from_coeffs(REFERENCE_G1), TrigPoly.from_coeffs(REFERENCE_G2)))
        reference = pairing_closed_form(
            UnitFunction.exp(pairs[0][0]), UnitFunction.exp(pairs[0][1])
        )
        out.rows.append(ctx.row("reference_pairing", reference.exp(), math.exp(-0.09)))
    for _ in range(params.count):
        pairs.append(
            (
                random_poly(rng, params.degree, params.amplitude, zero_mode=False),
                random_poly(rng, params.degree, params.amplitude, zero_mode=False),
            )
        )

    worst_inverse = 0.0
    for N in ctx.windows:
        w = ctx.window(N, params.guard)
        for i, (g1, g2) in enumerate(pairs):
            u1, u2 = UnitFunction.exp(g1), UnitFunction.exp(g2)
            expected = pairing_closed_form(u1, u2).exp()
            det = det_mult_commutator(u1, u2, w)
            out.rows.append(ctx.row(f"det[pair={i}]", det, expected, N=N))
            inverse = det * det_mult_commutator(u2, u1, w)
            out.rows.append(ctx.row(f"det_inverse_pair[pair={i}]", inverse, 1.0, N=N))
            worst_inverse = max(worst_inverse, abs(inverse - 1))
    out.constants["inverse_pair_deviation"] = worst_inverse
    return out


class Sigma2DeligneParams(ScenarioParams):
    count: int = Field(default=20, ge=1)
    degree: int = Field(default=3, ge=0)
    amplitude: float = Field(default=0.3, ge=0.0)
    max_winding: int = Field(default=3, ge=0)
    max_arcs: int = Field(default=8, ge=3)


def _random_unit(rng: np.random.Generator, degree: int, amplitude: float, max_winding: int):
    winding = int(rng.integers(-max_winding, max_winding + 1))
    return UnitFunction((winding,), random_poly(rng, degree, amplitude))


@scenario("sigma2_vs_deligne", Sigma2DeligneParams)
def sigma2_vs_deligne(params: Sigma2DeligneParams, ctx: RunContext) -> ScenarioOutcome:
    """σ₂(exp g ∪ u) against the Čech evaluation of the Deligne cup product."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    for i in range(params.count):
        g = random_poly(rng, params.degree, params.amplitude)
        u = _random_unit(rng, params.degree, params.amplitude, params.max_winding)
        cover = random_cover(rng, int(rng.integers(3, params.max_arcs + 1)))
        sigma = sigma_eval(ProductClass(g, (u,)))
        out.rows.append(
            ctx.cz_row(f"sigma2[{i}]", sigma, pairing_cech(UnitFunction.exp(g), u, cover))
        )
    return out


class Sigma2DeterminantParams(ScenarioParams):
    count: int = Field(default=10, ge=0)
    degree: int = Field(default=4, ge=1)
    amplitude: float = Field(default=0.05, ge=0.0)
    guard: int = Field(default=64, ge=1)


CALIBRATION_F = {1: 0.3}
CALIBRATION_H = {-1: 0.3}
EXAMPLE_F = {1: 0.3, -1: 0.3}
EXAMPLE_H = {-2: 0.4}


def _fit_orientation(sigma: CZValue, det: complex) -> tuple[int, dict[int, float]]:
    errors = {s: abs(r_dirac_compose(sigma, s).exp() - det) for s in (1, -1)}
    return min(errors, key=lambda s: (errors[s], -s)), errors


@scenario(
    "sigma2_vs_determinant",
    Sigma2DeterminantParams,
    kind=ScenarioKind.TRUNCATION,
    windowed=True,
    windows=(256,),
)
def sigma2_vs_determinant(params: Sigma2DeterminantParams, ctx: RunContext) -> ScenarioOutcome:
    """exp(2πi·s·σ₂) through the circle's flat evaluation against the Toeplitz determinant."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    calibration_window = ctx.window(max(ctx.windows), params.guard)
    f0 = TrigPoly.from_coeffs(CALIBRATION_F)
    u0 = UnitFunction.exp(TrigPoly.from_coeffs(CALIBRATION_H))
    sign, errors = _fit_orientation(
        sigma_eval(ProductClass(f0, (u0,))),
        det_mult_commutator(UnitFunction.exp(f0), u0, calibration_window),
    )
    logger.debug("sigma2_vs_determinant: orientation %+d (errors %s)", sign, errors)

    inputs = [(TrigPoly.from_coeffs(EXAMPLE_F), UnitFunction.exp(TrigPoly.from_coeffs(EXAMPLE_H)))]
    for _ in range(params.count):
        f = random_poly(rng, params.degree, params.amplitude, zero_mode=False)
        h = random_poly(rng, params.degree, params.amplitude, zero_mode=False)
        inputs.append((f, UnitFunction.exp(h)))

    for N in ctx.windows:
        w = ctx.window(N, params.guard)
        for i, (f, u) in enumerate(inputs):
            composed = r_dirac_compose(sigma_eval(ProductClass(f, (u,))), sign)
            det = det_mult_commutator(UnitFunction.exp(f), u, w)
            out.rows.append(ctx.row(f"exp_sigma2_vs_det[{i}]", composed.exp(), det, N=N))

    out.constants.update(
        orientation_sign=sign,
        flat_sign=CIRCLE_FLAT_SIGN,
        calibration_error_plus=errors[1],
        calibration_error_minus=errors[-1],
        calibration_degenerate=abs(errors[1] - errors[-1]) < 1e-12,
    )
    return out


# =============================================================================
# Exact structural checks
# =============================================================================


class VanishingParams(ScenarioParams):
    count: int = Field(default=5, ge=1)
    degree: int = Field(default=1, ge=0)
    amplitude: float = Field(default=0.2, ge=0.0)
    max_winding: int = Field(default=2, ge=0)


def _random_torus_unit(rng: np.random.Generator, dim: int, params: VanishingParams):
    winding = tuple(
        int(x) for x in rng.integers(-params.max_winding, params.max_winding + 1, size=dim)
    )
    return UnitFunction(winding, random_poly(rng, params.degree, params.amplitude, dim))


@scenario("vanishing_extra_factor", VanishingParams)
def vanishing_extra_factor(params: VanishingParams, ctx: RunContext) -> ScenarioOutcome:
    """Regulator forms with one unit factor too many vanish; top-dimensional classes are flat."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    for i, dim in itertools.product(range(params.count), (1, 2)):
        f = random_poly(rng, params.degree, params.amplitude, dim)
        units = [_random_torus_unit(rng, dim, params) for _ in range(dim + 1)]
        form = sigma_vanishing_extra_factor(f, units)
        out.rows.append(ctx.row(f"extra_factor[T{dim},{i}]", form.max_abs_coefficient(), 0.0))

        x = ProductClass(f, tuple(units[:dim]))
        out.rows.append(
            ctx.row(f"flat_top_dimension[T{dim},{i}]", curvature_form(x).max_abs_coefficient(), 0.0)
        )
        fiber = transgression_on_cylinder(x).fiber_integral()
        defect = (fiber - reg_product_form(x)).max_abs_coefficient()
        out.rows.append(ctx.row(f"transgression_fiber[T{dim},{i}]", defect, 0.0))
    return out


class ChainMapParams(ScenarioParams):
    count: int = Field(default=6, ge=1)
    max_degree: int = Field(default=3, ge=1)
    dims: list[int] = Field(default_factory=lambda: [1, 2])
    max_letter: int = Field(default=2, ge=1)
    terms: int = Field(default=3, ge=1)


def _random_chain(
    rng: np.random.Generator, degree: int, dim: int, layout: ChainLayout, params: ChainMapParams
) -> CyclicChain:
    if layout is ChainLayout.CYCLIC:
        lengths = list(range(degree + 1, 0, -2))
    else:
        lengths = [degree + 1, degree + 3]
    raw: dict = {}
    for length in lengths:
        for _ in range(params.terms):
            word = random_word(rng, length, params.max_letter, dim)
            raw[word] = raw.get(word, 0) + random_gaussian(rng)
    return CyclicChain.from_tensor(
        degree,
        [([TrigPoly.character(letter) for letter in word], c) for word, c in raw.items()],
        layout,
        dim,
    )


@scenario("chain_map_pi", ChainMapParams)
def chain_map_pi(params: ChainMapParams, ctx: RunContext) -> ScenarioOutcome:
    """π and π⁻ commute with the differentials; b∘b = 0, d∘d = 0 and Leibniz hold exactly."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    for i, dim in itertools.product(range(params.count), params.dims):
        degree = int(rng.integers(1, params.max_degree + 1))
        tag = f"T{dim},n={degree},{i}"

        c = _random_chain(rng, degree, dim, ChainLayout.CYCLIC, params)
        defect = pi_dd(total_differential(c)) - dd_differential(pi_dd(c))
        out.rows.append(ctx.row(f"pi_chain_map[{tag}]", _family_size(defect), 0.0))

        c = _random_chain(rng, degree, dim, ChainLayout.NEGATIVE, params)
        defect = pi_minus(total_differential(c)) - dd_differential(pi_minus(c))
        out.rows.append(ctx.row(f"pi_minus_chain_map[{tag}]", _family_size(defect), 0.0))

        words = [(random_word(rng, degree + 2, params.max_letter, dim), random_gaussian(rng))]
        lam = LambdaChain.build(degree + 1, dim, words)
        out.rows.append(ctx.row(f"b_b[{tag}]", _chain_size(boundary_b(boundary_b(lam))), 0.0))

        a = Form.function(random_gaussian_poly(rng, 2, 3, dim))
        b = Form.function(random_gaussian_poly(rng, 2, 3, dim))
        da = exterior_d(a)
        out.rows.append(ctx.row(f"d_d[{tag}]", exterior_d(da).max_abs_coefficient(), 0.0))
        if dim > 1:
            a = da
        leibniz = exterior_d(wedge(a, b)) - (
            wedge(exterior_d(a), b) + wedge(a, exterior_d(b)).scale((-1) ** a.degree)
        )
        out.rows.append(ctx.row(f"leibniz[{tag}]", leibniz.max_abs_coefficient(), 0.0))
    return out


class ShiftParams(ScenarioParams):
    count: int = Field(default=4, ge=1)
    dims: list[int] = Field(default_factory=lambda: [1, 2, 3])
    shift: int = Field(default=4)


def _random_closed_family(rng: np.random.Generator, dim: int) -> PeriodicFamily:
    """Constant-coefficient forms plus exact forms, spread over entries 0 and 1."""
    entries = []
    for p in (0, 1):
        for degree in range(1, dim + 1):
            axes = tuple(sorted(rng.choice(dim, size=degree, replace=False).tolist()))
            harmonic = Form.from_poly(TrigPoly.constant(random_gaussian(rng), dim), axes)
            lower = tuple(sorted(rng.choice(dim, size=degree - 1, replace=False).tolist()))
            potential = Form.from_poly(random_gaussian_poly(rng, 1, 2, dim), lower)
            entries.append((p, harmonic + exterior_d(potential)))
    return PeriodicFamily.build(dim, entries)


def _random_family(rng: np.random.Generator, dim: int) -> PeriodicFamily:
    entries = []
    for p in (0, 1, 2):
        for degree in range(dim + 1):
            axes = tuple(sorted(rng.choice(dim, size=degree, replace=False).tolist()))
            entries.append((p, Form.from_poly(random_gaussian_poly(rng, 1, 2, dim), axes)))
    return PeriodicFamily.build(dim, entries)


@scenario("hp_shift_roundtrip", ShiftParams)
def hp_shift_roundtrip(params: ShiftParams, ctx: RunContext) -> ScenarioOutcome:
    """Periodicity shifts invert, ψ commutes with d, harmonic representatives keep periods."""
    if params.shift % 2:
        raise LabError("BadParams", f"shift must be even, got {params.shift}")
    out = ScenarioOutcome()
    rng = ctx.rng()
    for i, dim in itertools.product(range(params.count), params.dims):
        tag = f"T{dim},{i}"
        gamma = _random_closed_family(rng, dim)
        back = shift(shift(gamma, params.shift), -params.shift) - gamma
        out.rows.append(ctx.row(f"shift_roundtrip[{tag}]", _family_size(back), 0.0))

        rep = hp_representative(gamma).rep
        again = hp_representative(rep).rep - rep
        out.rows.append(ctx.row(f"harmonic_idempotent[{tag}]", _family_size(again), 0.0))
        out.rows.append(
            ctx.row(f"harmonic_periods[{tag}]", integrate_family(rep), integrate_family(gamma))
        )

        family = _random_family(rng, dim)
        swapped = psi_project(dd_differential(family)) - dd_differential(psi_project(family))
        out.rows.append(ctx.row(f"psi_commutes_with_d[{tag}]", _family_size(swapped), 0.0))

    chain = CyclicChain.from_tensor(1, [([TrigPoly.character(-1), TrigPoly.character(1)], 1)])
    out.rows.append(
        ctx.row("pi_d_iso_character_pair", integrate_family(pi_d_iso(chain, 1).rep), TWO_PI_I)
    )
    return out


class DeligneParams(ScenarioParams):
    count: int = Field(default=20, ge=1)
    degree: int = Field(default=3, ge=0)
    amplitude: float = Field(default=0.3, ge=0.0)
    max_winding: int = Field(default=3, ge=0)
    max_arcs: int = Field(default=8, ge=3)


@scenario("deligne_cech_vs_closed", DeligneParams)
def deligne_cech_vs_closed(params: DeligneParams, ctx: RunContext) -> ScenarioOutcome:
    """Čech evaluation of u₁ ∪ u₂ against the closed form, refinement and (anti)symmetry."""
    out = ScenarioOutcome()
    rng = ctx.rng()
    for i in range(params.count):
        u1 = _random_unit(rng, params.degree, params.amplitude, params.max_winding)
        u2 = _random_unit(rng, params.degree, params.amplitude, params.max_winding)
        u3 = _random_unit(rng, params.degree, params.amplitude, params.max_winding)
        cover = random_cover(rng, int(rng.integers(3, params.max_arcs + 1)))

        cech = pairing_cech(u1, u2, cover)
        out.rows.append(ctx.cz_row(f"cech_vs_closed[{i}]", cech, pairing_closed_form(u1, u2)))
        out.rows.append(ctx.cz_row(f"refinement[{i}]", pairing_cech(u1, u2, cover.refine()), cech))
        symmetric = cech + pairing_cech(u2, u1, cover)
        out.rows.append(
            ctx.cz_row(f"antisymmetry[{i}]", symmetric, reduce(antisymmetry_defect(u1, u2)))
        )
        out.rows.append(
            ctx.cz_row(
                f"bilinearity[{i}]",
                pairing_cech(u1 * u3, u2, cover),
                cech + pairing_cech(u3, u2, cover),
            )
        )
    return out
