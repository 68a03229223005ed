"""Numerical checks of the two-dimensional Poincare inequality, its proof chain and the lemmas behind it."""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import logging
import math

from pydantic import BaseModel, Field

from orlicz_lab.core.errors import HypothesisFailed
from orlicz_lab.numerics.constants import KConstantReport, k1_phi, kp_phi_tilde, poincare_constant
from orlicz_lab.numerics.functions import PiecewiseLinear, TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import ProductMeasure, WeightedMeasure1D
from orlicz_lab.numerics.norms import (
    average_over_x1,
    gauge_norm_1d,
    gauge_norm_2d,
    integrate_over_x2,
    iterated_gauge,
    lp_norm,
    mean_1d,
    mean_2d,
    mixed_norm_hat,
    mixed_norm_p_phi,
    slice_gauge_integral,
)
from orlicz_lab.numerics.young import YoungFunction, check_gamma_convex, check_submultiplicative


logger = logging.getLogger(__name__)

POWER_EQUALITY_TOL = 1e-7
REFINEMENT_TOL = 1e-5


class StatementExponent(str, Enum):
    PROOF = "proof"
    STATEMENT = "statement"


class CheckStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


class VerificationReport(BaseModel):
    name: str = Field(..., description="Inequality identifier, e.g. poincare_2d[planes-0]")
    lhs: float = Field(..., description="Left-hand side")
    rhs: float = Field(..., description="Right-hand side; +inf when a constant is infinite")
    slack: float = Field(..., description="rhs - lhs")
    relative_slack: float = Field(..., description="(rhs - lhs) / |rhs|")
    passed: bool = Field(..., description="lhs <= rhs (1 + tol) + abs_floor and every recorded link holds")
    status: CheckStatus = Field(..., description="passed, failed or skipped (hypothesis failure)")
    links: dict[str, bool] = Field(default_factory=dict, description="Intermediate inequalities of the proof chain")
    diagnostics: dict[str, float | str | bool] = Field(default_factory=dict, description="Named intermediate quantities")
    flags: list[str] = Field(default_factory=list, description="infinite_constant, grid_unconverged, ...")
    seed: int | None = Field(None, description="RNG seed of the test function family")
    grid: str = Field("", description="Test-function grid size n1 x n2")


@dataclass(frozen=True)
class Experiment:
    """Phi, the six one-dimensional measures and the exponents of one configuration."""
    phi: YoungFunction
    mu1: WeightedMeasure1D
    mu2: WeightedMeasure1D
    nu1: WeightedMeasure1D
    nu2: WeightedMeasure1D
    w1: WeightedMeasure1D
    w2: WeightedMeasure1D
    p1: float = 2.0
    p2: float = 2.0
    s1: float = 2.0
    name: str = "experiment"
    statement_exponent: StatementExponent = StatementExponent.PROOF
    tolerance: float = 1e-5
    abs_floor: float = 1e-12
    c1_scale: float = 1.0

    def __post_init__(self):
        for label, value in (("p1", self.p1), ("p2", self.p2), ("s1", self.s1)):
            if not (1.0 <= value < math.inf):
                raise ValueError(f"{label} must satisfy 1 <= {label} < inf, got {value}")

    @property
    def mu(self) -> ProductMeasure:
        return ProductMeasure(self.mu1, self.mu2)

    @property
    def nu(self) -> ProductMeasure:
        return ProductMeasure(self.nu1, self.nu2)

    @property
    def exponent(self) -> float:
        return 1.0 / self.s1 if self.statement_exponent is StatementExponent.PROOF else self.s1

    @cached_property
    def c1(self) -> tuple[float, KConstantReport]:
        value, report = cached_constant(self.phi, self.mu1, self.nu1, self.w1, self.p1)
        return self.c1_scale * value, report

    @cached_property
    def c2(self) -> tuple[float, KConstantReport]:
        return cached_constant(self.phi, self.mu2, self.nu2, self.w2, self.p2)


@lru_cache(maxsize=128)
def cached_constant(phi, mu, nu, w, p) -> tuple[float, KConstantReport]:
    return poincare_constant(phi, mu, nu, w, p)


@lru_cache(maxsize=128)
def hypotheses_for(phi: YoungFunction, p1: float, p2: float) -> dict[str, bool]:
    submultiplicative, _ = check_submultiplicative(phi)
    return {
        "submultiplicative": submultiplicative,
        "invertible": phi.invertible,
        "gamma_convex_p1": check_gamma_convex(phi, p1)[0],
        "gamma_convex_p2": check_gamma_convex(phi, p2)[0],
    }


def require_hypotheses(exp: Experiment, names=None) -> dict[str, bool]:
    hypotheses = hypotheses_for(exp.phi, exp.p1, exp.p2)
    wanted = names or tuple(hypotheses)
    failed = [name for name in wanted if not hypotheses[name]]
    if failed:
        raise HypothesisFailed(f"{exp.name}: hypotheses fail: {', '.join(failed)}", hypotheses)
    return hypotheses


def holds(lhs: float, rhs: float, tol: float, floor: float) -> bool:
    if math.isinf(rhs) and rhs > 0:
        return True
    return lhs <= rhs * (1.0 + tol) + floor


def make_report(
    name: str,
    lhs: float,
    rhs: float,
    exp: Experiment,
    links: dict[str, bool] | None = None,
    diagnostics: dict | None = None,
    flags: list[str] | None = None,
    grid: str = "",
    seed: int | None = None,
) -> VerificationReport:
    links = links or {}
    slack = rhs - lhs
    if math.isinf(rhs):
        relative = math.inf
    else:
        relative = slack / abs(rhs) if rhs != 0.0 else (0.0 if lhs == 0.0 else -math.inf)
    passed = holds(lhs, rhs, exp.tolerance, exp.abs_floor) and all(links.values())
    return VerificationReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        relative_slack=relative,
        passed=passed,
        status=CheckStatus.PASSED if passed else CheckStatus.FAILED,
        links=links,
        diagnostics=diagnostics or {},
        flags=flags or [],
        seed=seed,
        grid=grid,
    )


def skipped_report(name: str, error: HypothesisFailed, seed: int | None = None, grid: str = "") -> VerificationReport:
    return VerificationReport(
        name=name,
        lhs=math.nan,
        rhs=math.nan,
        slack=math.nan,
        relative_slack=math.nan,
        passed=True,
        status=CheckStatus.SKIPPED,
        diagnostics={key: value for key, value in error.hypotheses.items()} | {"reason": str(error)},
        flags=["hypothesis_failed"],
        seed=seed,
        grid=grid,
    )


def _grid(f: TestFunction2D) -> str:
    return f"{f.x1_knots.size}x{f.x2_knots.size}"


def _scaled(constant: float, norm: float) -> float:
    # C * ||.|| with an infinite constant stays infinite
    return math.inf if math.isinf(constant) else constant * norm


def check_poincare_2d(exp: Experiment, f: TestFunction2D, name: str = "poincare_2d", seed: int | None = None) -> VerificationReport:
    """||f - f_av||_{L^Phi(mu)} <= C1 ||d1 f||_{(p1,Phi)} + C2 2[Phi^-1(1/mu1(I))]^-1 / nu1(I)^e ||d2 f||_{hat(s1,p2)}.

    The proof chain is recomputed alongside: lhs <= S + T, the S bound through
    the iterated gauge norm and the T bound through the second-variable
    lemma, Minkowski, the one-dimensional inequality and Hoelder.
    """
    hypotheses = require_hypotheses(exp)
    tol, floor = exp.tolerance, exp.abs_floor
    phi = exp.phi
    c1, k1_report = exp.c1
    c2, k2_report = exp.c2
    nu1_mass = exp.nu1.total_mass
    unit = phi.unit_norm(exp.mu1.total_mass)

    f_av = mean_2d(exp.nu, f)
    lhs = gauge_norm_2d(phi, exp.mu, f - f_av)

    e1 = average_over_x1(exp.nu1, f)
    residual = f.minus_x2_function(e1)
    h = TestFunction1D(e1.knots, e1.values - f_av)
    s_value = gauge_norm_2d(phi, exp.mu, residual)
    t_value = gauge_norm_2d(phi, exp.mu, TestFunction2D.from_x2_function(h, f.x1_knots))

    d1, d2 = f.partial_x1(), f.partial_x2()
    mixed = mixed_norm_p_phi(exp.w1, exp.p1, exp.mu2, phi, d1)
    hat_s = mixed_norm_hat(exp.nu1, exp.s1, exp.w2, exp.p2, d2)
    hat_1 = mixed_norm_hat(exp.nu1, 1.0, exp.w2, exp.p2, d2)

    first_term = _scaled(c1, mixed)
    second_term = _scaled(c2, 2.0 * unit / nu1_mass**exp.exponent * hat_s)
    rhs = first_term + second_term

    iterated = iterated_gauge(phi, exp.mu1, exp.mu2, residual)
    h_norm = gauge_norm_1d(phi, exp.mu2, h)
    slice_integral = _slice_oscillation_integral(exp, f)
    minkowski_bound = 2.0 / nu1_mass * slice_integral
    t_poincare = _scaled(c2, 2.0 * unit / nu1_mass * hat_1)
    t_holder = _scaled(c2, 2.0 * unit / nu1_mass ** (1.0 / exp.s1) * hat_s)

    links = {
        "triangle": holds(lhs, s_value + t_value, tol, floor),
        "s_product_norm": holds(s_value, iterated, tol, floor),
        "s_poincare": holds(iterated, first_term, tol, floor),
        "t_x2_sandwich": holds(t_value, unit * h_norm, tol, floor),
        "t_minkowski": holds(h_norm, minkowski_bound, tol, floor),
        "t_poincare": holds(unit * minkowski_bound, t_poincare, tol, floor),
        "t_holder": holds(t_poincare, t_holder, tol, floor),
    }
    flags = []
    if k1_report.infinite or k2_report.infinite:
        flags.append("infinite_constant")
    if not (k1_report.converged or k1_report.infinite) or not (k2_report.converged or k2_report.infinite):
        flags.append("sup_unconverged")

    diagnostics = {
        "S": s_value,
        "T": t_value,
        "C1": c1,
        "C2": c2,
        "K1": k1_report.value,
        "K2": k2_report.value,
        "f_av": f_av,
        "mixed_p_phi": mixed,
        "hat_s1": hat_s,
        "hat_1": hat_1,
        "iterated": iterated,
        "h_norm": h_norm,
        "slice_integral": slice_integral,
        "unit_norm_mu1": unit,
        "nu1_mass": nu1_mass,
        "exponent": exp.exponent,
        "lipschitz_bound": f.lipschitz_bound,
    } | hypotheses
    return make_report(name, lhs, rhs, exp, links, diagnostics, flags, _grid(f), seed)


def _slice_oscillation_integral(exp: Experiment, f: TestFunction2D) -> float:
    """int_I ||f(y1, .) - avg_{nu2} f(y1, .)||_{L^Phi(mu2)} dnu1(y1)."""
    row_means = average_over_x1(exp.nu2, f.transposed())
    centred = TestFunction2D(f.x1_knots, f.x2_knots, f.values - row_means.values[:, None])
    return slice_gauge_integral(exp.phi, exp.mu2, exp.nu1, centred.transposed())


def check_product_norm(exp: Experiment, F: TestFunction2D, name: str = "product_norm", seed: int | None = None) -> VerificationReport:
    """||F||_{L^Phi(mu)} <= || ||F||_{L^Phi(mu1)} ||_{L^Phi(mu2)} for submultiplicative Phi."""
    require_hypotheses(exp, ("submultiplicative",))
    lhs = gauge_norm_2d(exp.phi, exp.mu, F)
    rhs = iterated_gauge(exp.phi, exp.mu1, exp.mu2, F)
    return make_report(name, lhs, rhs, exp, grid=_grid(F), seed=seed)


def _one_variable_sandwich(
    exp: Experiment, F: TestFunction2D, g: PiecewiseLinear, g_measure: WeightedMeasure1D,
    other_measure: WeightedMeasure1D, name: str, seed: int | None,
) -> VerificationReport:
    require_hypotheses(exp, ("submultiplicative", "invertible"))
    phi = exp.phi
    other_mass = other_measure.total_mass
    g_norm = gauge_norm_1d(phi, g_measure, g)
    middle = gauge_norm_2d(phi, exp.mu, F)
    lower = phi.inverse(other_mass) * g_norm
    upper = phi.unit_norm(other_mass) * g_norm

    links = {"lower_bound": holds(lower, middle, exp.tolerance, exp.abs_floor)}
    if phi.is_pure_power:
        scale = max(abs(middle), exp.abs_floor)
        links["power_equality"] = (
            abs(lower - middle) <= POWER_EQUALITY_TOL * scale and abs(upper - middle) <= POWER_EQUALITY_TOL * scale
        )
    diagnostics = {"lower": lower, "g_norm": g_norm, "other_mass": other_mass}
    return make_report(name, middle, upper, exp, links, diagnostics, grid=_grid(F), seed=seed)


def check_x2_sandwich(exp: Experiment, g: TestFunction1D, x1_knots=None, name: str = "x2_sandwich", seed: int | None = None) -> VerificationReport:
    """Phi^-1(mu1(I)) ||g|| <= ||F|| <= [Phi^-1(1/mu1(I))]^-1 ||g|| for F(x1, x2) = g(x2)."""
    knots = x1_knots if x1_knots is not None else [exp.mu1.a, exp.mu1.b]
    F = TestFunction2D.from_x2_function(g, knots)
    return _one_variable_sandwich(exp, F, g, exp.mu2, exp.mu1, name, seed)


def check_x1_sandwich(exp: Experiment, g: TestFunction1D, x2_knots=None, name: str = "x1_sandwich", seed: int | None = None) -> VerificationReport:
    """Mirror of the second-variable sandwich for F(x1, x2) = g(x1)."""
    knots = x2_knots if x2_knots is not None else [exp.mu2.a, exp.mu2.b]
    F = TestFunction2D.from_x1_function(g, knots)
    return _one_variable_sandwich(exp, F, g, exp.mu1, exp.mu2, name, seed)


def check_minkowski(exp: Experiment, F: TestFunction2D, name: str = "minkowski", seed: int | None = None) -> VerificationReport:
    """|| int F(., t) dt ||_{L^Phi(mu1)} <= 2 int ||F(., t)||_{L^Phi(mu1)} dt over t in J."""
    phi = exp.phi
    lebesgue = WeightedMeasure1D.lebesgue(exp.mu2.a, exp.mu2.b)
    lhs = gauge_norm_1d(phi, exp.mu1, integrate_over_x2(lebesgue, F))
    integral = slice_gauge_integral(phi, exp.mu1, lebesgue, F)
    ratio = lhs / integral if integral > 0.0 else 0.0
    links = {"norm_triangle": holds(lhs, integral, exp.tolerance, exp.abs_floor)}
    diagnostics = {"norm_integral": integral, "constant_one_ratio": ratio}
    return make_report(name, lhs, 2.0 * integral, exp, links, diagnostics, grid=_grid(F), seed=seed)


def check_necessity_reduction(exp: Experiment, g: TestFunction1D, name: str = "necessity_reduction", seed: int | None = None) -> VerificationReport:
    """One-variable reduction: the two-dimensional inequality for F = g(x2) bounds ||g - avg||_{L^Phi(mu2)}.

    Records the second-variable lower bound and the collapse of the hat norm
    to nu1(I)^{1/s1} ||g'||_{L^p2(w2)}.
    """
    require_hypotheses(exp, ("submultiplicative", "invertible"))
    phi = exp.phi
    tol, floor = exp.tolerance, exp.abs_floor
    c2, report = exp.c2
    mu1_mass, nu1_mass = exp.mu1.total_mass, exp.nu1.total_mass

    centred = TestFunction1D(g.knots, g.values - mean_1d(exp.nu2, g))
    F = TestFunction2D.from_x2_function(centred, [exp.mu1.a, exp.mu1.b])
    lhs = gauge_norm_1d(phi, exp.mu2, centred)
    lifted = gauge_norm_2d(phi, exp.mu, F)
    inverse_mass = 1.0 / phi.inverse(mu1_mass)

    derivative_norm = lp_norm(exp.w2, exp.p2, g.derivative())
    hat = mixed_norm_hat(exp.nu1, exp.s1, exp.w2, exp.p2, F.partial_x2())
    collapsed = nu1_mass ** (1.0 / exp.s1) * derivative_norm
    prefactor = inverse_mass * 2.0 * phi.unit_norm(mu1_mass) / nu1_mass**exp.exponent
    rhs = _scaled(c2, prefactor * collapsed)

    links = {
        "x2_sandwich_lower": holds(lhs, inverse_mass * lifted, tol, floor),
        "hat_collapse": abs(hat - collapsed) <= tol * max(abs(collapsed), floor),
    }
    flags = ["infinite_constant"] if report.infinite else []
    diagnostics = {"lifted": lifted, "hat": hat, "collapsed": collapsed, "C2": c2}
    return make_report(name, lhs, rhs, exp, links, diagnostics, flags, grid=f"{g.knots.size}", seed=seed)


def refinement_check(exp: Experiment, f: TestFunction2D, check=check_poincare_2d, factor: int = 2) -> VerificationReport:
    """Re-run a check on the refined grid; flag grid_unconverged when lhs or rhs move."""
    base = check(exp, f)
    fine = check(exp, f.refined(factor))

    def moved(a: float, b: float) -> bool:
        if not (math.isfinite(a) and math.isfinite(b)):
            return a != b
        return abs(a - b) > REFINEMENT_TOL * max(abs(a), abs(b), exp.abs_floor)

    converged = not (moved(base.lhs, fine.lhs) or moved(base.rhs, fine.rhs))
    diagnostics = dict(base.diagnostics) | {"lhs_refined": fine.lhs, "rhs_refined": fine.rhs, "grid_converged": converged}
    flags = list(base.flags) + ([] if converged else ["grid_unconverged"])
    if not converged:
        logger.warning(f"{base.name}: lhs/rhs moved by more than {REFINEMENT_TOL} under grid refinement")
    return base.model_copy(update={"diagnostics": diagnostics, "flags": flags})


def k_tilde(exp: Experiment, axis: int) -> KConstantReport:
    """K~_{p_i,Phi}(mu_i, nu_i, w_i); for p_i = 1 this is K_{1,Phi}."""
    phi = exp.phi
    mu, nu, w, p = (exp.mu1, exp.nu1, exp.w1, exp.p1) if axis == 1 else (exp.mu2, exp.nu2, exp.w2, exp.p2)
    if p == 1.0:
        return k1_phi(phi, mu, nu, w)
    return kp_phi_tilde(phi, mu, nu, w, p)


def describe(report: VerificationReport) -> str:
    failed = [name for name, ok in report.links.items() if not ok]
    text = f"{report.name}: lhs={report.lhs:.6g} rhs={report.rhs:.6g} status={report.status.value}"
    return text + (f" failed links: {', '.join(failed)}" if failed else "")

