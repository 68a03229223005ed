import math

import numpy as np
import pytest

from orlicz_lab.core.errors import HypothesisFailed
from orlicz_lab.numerics.functions import TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import WeightedMeasure1D
from orlicz_lab.numerics.young import ExpPowerYoung, PowerYoung
from orlicz_lab.verify.checks import (
    CheckStatus,
    StatementExponent,
    check_product_norm,
    check_x2_sandwich,
    check_x1_sandwich,
    check_minkowski,
    check_necessity_reduction,
    check_poincare_2d,
    describe,
    k_tilde,
    make_report,
    refinement_check,
    skipped_report,
)

from conftest import lebesgue_experiment


def plane(c00, c10, c01, c11=0.0):
    return TestFunction2D.from_callable(lambda x1, x2: c00 + c10 * x1 + c01 * x2 + c11 * x1 * x2, [0.0, 1.0], [0.0, 1.0])


@pytest.mark.parametrize("f", [plane(0.0, 0.0, 0.0, 1.0), plane(1.0, 2.0, -1.0), plane(0.0, 0.0, 1.0)])
def test_poincare_2d_holds_with_every_link(f):
    report = check_poincare_2d(lebesgue_experiment(), f)
    assert report.status is CheckStatus.PASSED
    assert report.lhs <= report.rhs
    assert all(report.links.values()), report.links
    assert report.diagnostics["C1"] == pytest.approx(2.0 * math.sqrt(2.0) * 0.375, rel=1e-5)
    assert report.grid == "2x2"


def test_poincare_2d_on_weighted_measures(rng):
    w = WeightedMeasure1D.tabulated(0.0, 1.0, [(0.0, 1.0), (0.5, 2.0), (1.0, 1.5)])
    exp = lebesgue_experiment(phi=PowerYoung(3.0), p=2.0, w1=w, nu2=w, s1=1.5)
    f = TestFunction2D(np.linspace(0.0, 1.0, 4), np.linspace(0.0, 1.0, 4), rng.uniform(-1.0, 1.0, (4, 4)))
    report = check_poincare_2d(exp, f, seed=5)
    assert report.passed
    assert report.seed == 5


def test_statement_exponent_changes_second_term():
    f = plane(0.0, 0.0, 1.0)
    nu = WeightedMeasure1D.constant(0.0, 1.0, 3.0)
    proof = check_poincare_2d(lebesgue_experiment(nu1=nu), f)
    statement = check_poincare_2d(lebesgue_experiment(nu1=nu, statement_exponent=StatementExponent.STATEMENT), f)
    assert proof.diagnostics["exponent"] == 0.5
    assert statement.diagnostics["exponent"] == 2.0
    assert statement.rhs < proof.rhs


def test_scaled_constant_breaks_inequality():
    exp = lebesgue_experiment(p=1.0, c1_scale=0.5)
    report = check_poincare_2d(exp, plane(0.0, 1.0, 0.0))
    assert report.lhs == pytest.approx(math.sqrt(1.0 / 12.0), rel=1e-9)
    assert report.rhs == pytest.approx(0.25, rel=1e-5)
    assert report.status is CheckStatus.FAILED
    assert "status=failed" in describe(report)


def test_unscaled_p_one_passes():
    report = check_poincare_2d(lebesgue_experiment(p=1.0), plane(0.0, 1.0, 0.0))
    assert report.passed
    assert report.rhs == pytest.approx(0.5, rel=1e-5)


def test_exp_power_fails_gamma_convexity():
    exp = lebesgue_experiment(phi=ExpPowerYoung(1.0))
    with pytest.raises(HypothesisFailed) as info:
        check_poincare_2d(exp, plane(0.0, 1.0, 1.0))
    assert not info.value.hypotheses["gamma_convex_p1"]
    skipped = skipped_report("x", info.value)
    assert skipped.passed and skipped.status is CheckStatus.SKIPPED
    assert skipped.flags == ["hypothesis_failed"]


def test_iterated_gauge_dominates(rng):
    F = TestFunction2D(np.linspace(0.0, 1.0, 5), np.linspace(0.0, 1.0, 3), rng.normal(size=(5, 3)))
    report = check_product_norm(lebesgue_experiment(phi=PowerYoung(3.0)), F)
    assert report.passed


@pytest.mark.parametrize("b", [1.0, 2.0, 0.25])
def test_one_variable_sandwich_is_equality_for_powers(b):
    interval = WeightedMeasure1D.lebesgue(0.0, b)
    g = TestFunction1D([0.0, 0.4, 1.0], [1.0, -0.5, 2.0])
    second = check_x2_sandwich(lebesgue_experiment(mu1=interval, nu1=interval, w1=interval), g)
    assert second.passed
    assert second.links == {"lower_bound": True, "power_equality": True}
    assert second.lhs == pytest.approx(second.rhs, rel=1e-9)

    h = TestFunction1D([0.0, b], [0.0, 1.0])
    first = check_x1_sandwich(lebesgue_experiment(mu1=interval, nu1=interval, w1=interval), h, x2_knots=[0.0, 0.5, 1.0])
    assert first.passed
    assert first.links["power_equality"]


def test_minkowski_ratio_at_most_one(rng):
    F = TestFunction2D(np.linspace(0.0, 1.0, 4), np.linspace(0.0, 1.0, 4), rng.normal(size=(4, 4)))
    report = check_minkowski(lebesgue_experiment(), F)
    assert report.passed
    assert report.diagnostics["constant_one_ratio"] <= 1.0 + 1e-9


def test_necessity_reduction_collapses_hat_norm():
    g = TestFunction1D([0.0, 0.5, 1.0], [0.0, 1.0, 0.5])
    report = check_necessity_reduction(lebesgue_experiment(), g)
    assert report.passed
    assert report.links["hat_collapse"]
    assert report.links["x2_sandwich_lower"]


def test_refinement_of_bilinear_function_is_converged():
    report = refinement_check(lebesgue_experiment(), plane(0.0, 1.0, 1.0, 1.0))
    assert report.diagnostics["grid_converged"]
    assert "grid_unconverged" not in report.flags


def test_k_tilde_uses_k1_for_p_one():
    exp = lebesgue_experiment(p=1.0)
    assert k_tilde(exp, 1).kind.value == "k1"
    assert k_tilde(lebesgue_experiment(), 2).value == pytest.approx(0.375, rel=1e-5)


def test_infinite_rhs_passes():
    report = make_report("x", 3.0, math.inf, lebesgue_experiment())
    assert report.passed
    assert report.relative_slack == math.inf


@pytest.mark.parametrize(
    "lhs, rhs, passed",
    [(1.0, 1.0, True), (1.0 + 1e-7, 1.0, True), (1.001, 1.0, False), (1e-13, 0.0, True), (1e-6, 0.0, False)],
)
def test_tolerance_and_floor(lhs, rhs, passed):
    assert make_report("x", lhs, rhs, lebesgue_experiment()).passed is passed


def test_invalid_exponent_is_rejected():
    with pytest.raises(ValueError):
        lebesgue_experiment(p=0.5)


def test_translation_leaves_reports_unchanged():
    f = plane(0.5, 1.0, -2.0, 0.5)
    base = check_poincare_2d(lebesgue_experiment(), f)
    m = WeightedMeasure1D.lebesgue(0.0, 1.0)
    fields = {name: m.shifted(1.0 if name.endswith("1") else -2.0) for name in ("mu1", "mu2", "nu1", "nu2", "w1", "w2")}
    moved = check_poincare_2d(lebesgue_experiment(**fields), f.shifted(1.0, -2.0))
    assert moved.lhs == pytest.approx(base.lhs, rel=1e-8)
    assert moved.rhs == pytest.approx(base.rhs, rel=1e-8)


def test_constant_function_has_zero_sides():
    report = check_poincare_2d(lebesgue_experiment(), plane(2.0, 0.0, 0.0))
    assert report.lhs == pytest.approx(0.0, abs=1e-14)
    assert report.rhs == 0.0
    assert report.passed


def test_sum_of_planes_lhs():
    report = check_poincare_2d(lebesgue_experiment(), plane(0.0, 1.0, 1.0))
    assert report.lhs == pytest.approx(1.0 / math.sqrt(6.0), rel=1e-10)
