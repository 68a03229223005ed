"""Test-function families, the default configuration grid and the per-experiment check runner."""

from enum import Enum

import itertools
import logging

import numpy as np

from orlicz_lab.core.errors import HypothesisFailed
from orlicz_lab.numerics.functions import TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import WeightedMeasure1D
from orlicz_lab.numerics.young import PowerYoung, YoungFunction
from orlicz_lab.verify.checks import (
    CheckStatus,
    Experiment,
    VerificationReport,
    check_product_norm,
    check_x2_sandwich,
    check_x1_sandwich,
    check_minkowski,
    check_necessity_reduction,
    check_poincare_2d,
    refinement_check,
    skipped_report,
)


logger = logging.getLogger(__name__)

DEFAULT_GRID = 9


class Family(str, Enum):
    PLANES = "planes"
    PRODUCTS = "products"
    RANDOM_BILINEAR = "random_bilinear"
    RAMPS = "ramps"


Intervals = tuple[tuple[float, float], tuple[float, float]]


def _axes(intervals: Intervals, grid: int) -> tuple[np.ndarray, np.ndarray]:
    (a, b), (c, d) = intervals
    return np.linspace(a, b, grid), np.linspace(c, d, grid)


def _local(intervals: Intervals):
    """Coordinates rescaled to [0, 1]^2 so every family looks the same on every rectangle."""
    (a, b), (c, d) = intervals
    return lambda x1: (x1 - a) / (b - a), lambda x2: (x2 - c) / (d - c)


def planes(intervals: Intervals, grid: int = DEFAULT_GRID) -> list[tuple[str, TestFunction2D]]:
    u, v = _local(intervals)
    x1, x2 = _axes(intervals, grid)
    coefficients = [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (2.0, -1.0), (0.0, 0.0)]
    return [
        (f"plane[{p},{q}]", TestFunction2D.from_callable(lambda s, t, p=p, q=q: p * u(s) + q * v(t), x1, x2))
        for p, q in coefficients
    ]


def products(intervals: Intervals, grid: int = DEFAULT_GRID) -> list[tuple[str, TestFunction2D]]:
    u, v = _local(intervals)
    x1, x2 = _axes(intervals, grid)
    makers = {
        "x1*x2": lambda s, t: u(s) * v(t),
        "(x1-1/2)*(x2-1/2)": lambda s, t: (u(s) - 0.5) * (v(t) - 0.5),
        "sin*cos": lambda s, t: np.sin(np.pi * u(s)) * np.cos(np.pi * v(t)),
        "x1^2*x2": lambda s, t: u(s) ** 2 * v(t),
    }
    return [(f"product[{label}]", TestFunction2D.from_callable(maker, x1, x2)) for label, maker in makers.items()]


def random_bilinear(
    intervals: Intervals, grid: int = DEFAULT_GRID, count: int = 10, seed: int = 0
) -> list[tuple[str, TestFunction2D]]:
    """Node values uniform on [-1, 1] from a seeded generator."""
    rng = np.random.default_rng(seed)
    x1, x2 = _axes(intervals, grid)
    return [
        (f"random[{seed}:{i}]", TestFunction2D(x1, x2, rng.uniform(-1.0, 1.0, size=(grid, grid))))
        for i in range(count)
    ]


def ramps(intervals: Intervals, grid: int = DEFAULT_GRID, count: int = 4) -> list[tuple[str, TestFunction2D]]:
    """One-variable ramps clip((x - c)/delta) in either variable."""
    (a, b), (c, d) = intervals
    out = []
    for axis, (lo, hi), other in ((1, (a, b), (c, d)), (2, (c, d), (a, b))):
        for start in np.linspace(lo, hi, count, endpoint=False):
            delta = (hi - lo) / 4.0
            end = min(start + delta, hi)
            knots = np.unique(np.concatenate([np.linspace(lo, hi, grid), [start, end]]))
            g = TestFunction1D(knots, np.clip((knots - start) / delta, 0.0, 1.0))
            other_knots = np.linspace(*other, 2)
            F = TestFunction2D.from_x1_function(g, other_knots) if axis == 1 else TestFunction2D.from_x2_function(g, other_knots)
            out.append((f"ramp[x{axis},{start:.4g}]", F))
    return out


def build_family(
    family: Family, intervals: Intervals, grid: int = DEFAULT_GRID, count: int = 10, seed: int = 0
) -> list[tuple[str, TestFunction2D]]:
    family = Family(family)
    if family is Family.PLANES:
        return planes(intervals, grid)
    if family is Family.PRODUCTS:
        return products(intervals, grid)
    if family is Family.RANDOM_BILINEAR:
        return random_bilinear(intervals, grid, count, seed)
    return ramps(intervals, grid, count)


def bump_density(a: float, b: float) -> WeightedMeasure1D:
    middle = 0.5 * (a + b)
    return WeightedMeasure1D.tabulated(a, b, [(a, 0.5), (middle, 1.5), (b, 0.5)])


def default_densities(a: float = 0.0, b: float = 1.0) -> dict[str, WeightedMeasure1D]:
    return {
        "constant": WeightedMeasure1D.constant(a, b, 1.0),
        "power_law_0.5": WeightedMeasure1D.power_law(a, b, 0.5),
        "power_law_1": WeightedMeasure1D.power_law(a, b, 1.0),
        "tabulated_bump": bump_density(a, b),
    }


def default_grid(
    phis: dict[str, YoungFunction] | None = None,
    densities: dict[str, WeightedMeasure1D] | None = None,
    p_values=(1.0, 2.0),
    **overrides,
) -> list[Experiment]:
    """Phi x density x p grid; one density kind is used for all six measures of an experiment."""
    phis = phis or {f"power_{q}": PowerYoung(float(q)) for q in (2, 3, 4)}
    densities = densities or default_densities()
    experiments = []
    for (phi_name, phi), (density_name, m), p in itertools.product(phis.items(), densities.items(), p_values):
        experiments.append(
            Experiment(
                phi=phi, mu1=m, mu2=m, nu1=m, nu2=m, w1=m, w2=m,
                p1=float(p), p2=float(p), s1=float(p),
                name=f"{phi_name}/{density_name}/p={p:g}",
                **overrides,
            )
        )
    logger.info(f"default grid holds {len(experiments)} experiments")
    return experiments


class CheckKind(str, Enum):
    POINCARE_2D = "poincare_2d"
    PRODUCT_NORM = "product_norm"
    X2_SANDWICH = "x2_sandwich"
    X1_SANDWICH = "x1_sandwich"
    MINKOWSKI = "minkowski"
    NECESSITY_REDUCTION = "necessity_reduction"


def x2_profile(F: TestFunction2D) -> TestFunction1D:
    """F(a, .) on the x2 knots."""
    return TestFunction1D(F.x2_knots, F.values[0, :])


def x1_profile(F: TestFunction2D) -> TestFunction1D:
    """F(., c) on the x1 knots."""
    return TestFunction1D(F.x1_knots, F.values[:, 0])


def _run_check(exp: Experiment, check: CheckKind, label: str, F: TestFunction2D, seed, refinement: bool) -> VerificationReport:
    name = f"{exp.name}/{check.value}[{label}]"
    if check is CheckKind.POINCARE_2D:
        if refinement:
            return refinement_check(exp, F, lambda e, f: check_poincare_2d(e, f, name, seed))
        return check_poincare_2d(exp, F, name, seed)
    if check is CheckKind.PRODUCT_NORM:
        return check_product_norm(exp, F, name, seed)
    if check is CheckKind.X2_SANDWICH:
        return check_x2_sandwich(exp, x2_profile(F), F.x1_knots, name, seed)
    if check is CheckKind.X1_SANDWICH:
        return check_x1_sandwich(exp, x1_profile(F), F.x2_knots, name, seed)
    if check is CheckKind.MINKOWSKI:
        return check_minkowski(exp, F, name, seed)
    return check_necessity_reduction(exp, x2_profile(F), name, seed)


def run_experiment(
    exp: Experiment,
    functions: list[tuple[str, TestFunction2D]],
    checks=tuple(CheckKind),
    seed: int | None = None,
    refinement: bool = False,
) -> list[VerificationReport]:
    """Every check on every function, in that order; hypothesis failures become skipped rows."""
    reports = []
    for check in map(CheckKind, checks):
        for label, F in functions:
            try:
                reports.append(_run_check(exp, check, label, F, seed, refinement))
            except HypothesisFailed as error:
                name = f"{exp.name}/{check.value}[{label}]"
                logger.warning(f"{name} skipped: {error}")
                reports.append(skipped_report(name, error, seed, f"{F.x1_knots.size}x{F.x2_knots.size}"))
    failed = sum(1 for report in reports if report.status is CheckStatus.FAILED)
    logger.info(f"{exp.name}: {len(reports)} checks, {failed} failed")
    return reports
