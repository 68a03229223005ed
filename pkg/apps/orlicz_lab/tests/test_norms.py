import math

import numpy as np
import pytest
from scipy import integrate

from orlicz_lab.core.errors import OverflowDomain, ZeroMassError
from orlicz_lab.numerics.functions import PiecewiseLinear, TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import ProductMeasure, WeightedMeasure1D
from orlicz_lab.numerics.norms import (
    average_over_x1,
    gauge_norm_1d,
    gauge_norm_2d,
    integrate_over_x2,
    iterated_gauge,
    lp_norm,
    lp_norm_2d,
    mean_1d,
    mean_2d,
    mixed_norm_hat,
    mixed_norm_p_phi,
    mixed_norm_pq,
    modular_1d,
    slice_gauge_integral,
    step_gauge_norm,
)
from orlicz_lab.numerics.young import ExpPowerYoung, PowerYoung, TabulatedYoung


IDENTITY = TestFunction1D([0.0, 1.0], [0.0, 1.0])


def x1x2():
    return TestFunction2D.from_callable(lambda x1, x2: x1 * x2, [0.0, 1.0], [0.0, 1.0])


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0, 6.0])
def test_power_gauge_norm_is_lq_norm(lebesgue, q):
    expected = (1.0 / (q + 1.0)) ** (1.0 / q)
    assert gauge_norm_1d(PowerYoung(q), lebesgue, IDENTITY) == pytest.approx(expected, rel=1e-10)
    assert lp_norm(lebesgue, q, IDENTITY) == pytest.approx(expected, rel=1e-12)


def test_gauge_norm_of_product_function(lebesgue, power2):
    pm = ProductMeasure(lebesgue, lebesgue)
    assert gauge_norm_2d(power2, pm, x1x2()) == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert lp_norm_2d(pm, 2.0, x1x2()) == pytest.approx(1.0 / 3.0, rel=1e-12)


@pytest.mark.parametrize(
    "phi, a, b, expected",
    [
        (PowerYoung(2.0), 0.0, 2.0, math.sqrt(2.0)),
        (PowerYoung(3.0), 0.0, 0.5, 0.5 ** (1.0 / 3.0)),
        (ExpPowerYoung(1.0), 0.0, 2.0, 1.0 / math.log(1.5)),
    ],
)
def test_gauge_norm_of_constant_one_is_unit_norm(phi, a, b, expected):
    m = WeightedMeasure1D.lebesgue(a, b)
    one = TestFunction1D.constant(a, b, 1.0)
    assert gauge_norm_1d(phi, m, one) == pytest.approx(expected, rel=1e-9)
    assert phi.unit_norm(m.total_mass) == pytest.approx(expected, rel=1e-9)


def test_zero_function_has_zero_norms(lebesgue, power2):
    zero = TestFunction1D([0.0, 1.0], [0.0, 0.0])
    assert gauge_norm_1d(power2, lebesgue, zero) == 0.0
    assert lp_norm(lebesgue, 2.0, zero) == 0.0


def test_mixed_norms_of_product_function(lebesgue, power2):
    F = x1x2()
    assert mixed_norm_pq(lebesgue, 2.0, lebesgue, 2.0, F) == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert mixed_norm_hat(lebesgue, 2.0, lebesgue, 2.0, F) == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert mixed_norm_p_phi(lebesgue, 2.0, lebesgue, power2, F) == pytest.approx(1.0 / 3.0, rel=1e-10)
    # ||x1||_{L^3} ||x2||_{L^2}
    expected = 0.25 ** (1.0 / 3.0) / math.sqrt(3.0)
    assert mixed_norm_pq(lebesgue, 3.0, lebesgue, 2.0, F) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("q", [2.0, 3.0])
def test_iterated_power_gauge_equals_joint_gauge(lebesgue, q):
    phi = PowerYoung(q)
    F = x1x2()
    joint = gauge_norm_2d(phi, ProductMeasure(lebesgue, lebesgue), F)
    assert iterated_gauge(phi, lebesgue, lebesgue, F) == pytest.approx(joint, rel=1e-10)
    assert joint == pytest.approx((q + 1.0) ** (-2.0 / q), rel=1e-10)


def test_iterated_gauge_general_phi_matches_columnwise_norms(lebesgue):
    phi = ExpPowerYoung(1.0)
    F = x1x2()
    # inner norm is x2 ||x1||_Phi, so the outer norm factorises
    factor = gauge_norm_1d(phi, lebesgue, IDENTITY)
    assert iterated_gauge(phi, lebesgue, lebesgue, F) == pytest.approx(factor * factor, rel=1e-8)


@pytest.mark.parametrize("phi", [PowerYoung(2.0), PowerYoung(1.5), ExpPowerYoung(1.0)])
def test_step_gauge_norm_matches_step_function(lebesgue, phi):
    step = PiecewiseLinear(np.array([0.0, 0.3, 1.0]), np.array([-1.0, 2.0]), np.array([-1.0, 2.0]))
    expected = gauge_norm_1d(phi, lebesgue, step)
    assert step_gauge_norm(phi, lebesgue, 0.3, 2.0, -1.0) == pytest.approx(expected, rel=1e-9)


def test_step_gauge_norm_power_two_closed_form(lebesgue, power2):
    assert step_gauge_norm(power2, lebesgue, 0.3, 2.0, -1.0) == pytest.approx(math.sqrt(3.1), rel=1e-10)
    assert step_gauge_norm(power2, lebesgue, 0.3, 0.0, 0.0) == 0.0


def test_tabulated_linear_phi_is_l1(lebesgue):
    phi = TabulatedYoung.from_knots([(0.0, 0.0), (1.0, 1.0)])
    assert gauge_norm_1d(phi, lebesgue, IDENTITY) == pytest.approx(0.5, rel=1e-9)


def test_tabulated_kinked_phi_modular_at_norm(lebesgue):
    phi = TabulatedYoung.from_knots([(0.0, 0.0), (1.0, 0.5), (2.0, 3.0)])
    f = TestFunction1D([0.0, 1.0], [0.0, 3.0])
    k = gauge_norm_1d(phi, lebesgue, f)
    assert modular_1d(phi, lebesgue, f, k) == pytest.approx(1.0, abs=1e-9)


def test_exp_power_modular_at_norm_is_one(lebesgue):
    phi = ExpPowerYoung(1.0)
    k = gauge_norm_1d(phi, lebesgue, IDENTITY)
    assert modular_1d(phi, lebesgue, IDENTITY, k) == pytest.approx(1.0, abs=1e-9)


def test_modular_overflow_is_reported(lebesgue):
    one = TestFunction1D.constant(0.0, 1.0, 1.0)
    with pytest.raises(OverflowDomain):
        modular_1d(ExpPowerYoung(2.0), lebesgue, one, 1e-3)
    with pytest.raises(ValueError):
        modular_1d(ExpPowerYoung(2.0), lebesgue, one, 0.0)


def test_weighted_lp_norm():
    w = WeightedMeasure1D.power_law(0.0, 1.0, 1.0)
    one = TestFunction1D.constant(0.0, 1.0, 1.0)
    assert lp_norm(w, 2.0, one) == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert lp_norm(w, 2.0, IDENTITY) == pytest.approx(0.5, rel=1e-12)


def test_means_and_partial_averages(lebesgue):
    pm = ProductMeasure(lebesgue, lebesgue)
    assert mean_1d(lebesgue, IDENTITY) == pytest.approx(0.5)
    assert mean_2d(pm, x1x2()) == pytest.approx(0.25)
    ts = np.linspace(0.0, 1.0, 7)
    np.testing.assert_allclose(average_over_x1(lebesgue, x1x2())(ts), ts / 2.0, atol=1e-14)
    np.testing.assert_allclose(integrate_over_x2(lebesgue, x1x2())(ts), ts / 2.0, atol=1e-14)


def test_zero_mass_average_raises(power2):
    empty = WeightedMeasure1D.constant(0.0, 1.0, 0.0)
    with pytest.raises(ZeroMassError):
        mean_1d(empty, IDENTITY)
    with pytest.raises(ZeroMassError):
        mean_2d(ProductMeasure(empty, empty), x1x2())
    assert gauge_norm_1d(power2, empty, IDENTITY) == 0.0


@pytest.mark.parametrize("p", [0.5, 0.0, -1.0])
def test_lp_exponent_below_one_is_rejected(lebesgue, p):
    with pytest.raises(ValueError):
        lp_norm(lebesgue, p, IDENTITY)


def _quad(g, points) -> float:
    points = np.unique(np.asarray(points, dtype=float))
    return sum(
        integrate.quad(g, lo, hi, epsabs=0.0, epsrel=1e-11, limit=200)[0] for lo, hi in zip(points[:-1], points[1:])
    )


def row_integral(h, m1, F, x2, levels=()) -> float:
    """int h(F(x1, x2)) dm1(x1) by scipy, split at the knots, sign changes and level crossings of the row."""
    line = F.slice_x1(x2)
    points = [m1.edges, line.knots, line.zero_crossings()] + [line.level_crossings(level) for level in levels]
    return _quad(lambda x1: float(h(F(x1, x2))) * float(m1.density(x1)), np.concatenate(points))


def outer_integral(g, m2, F) -> float:
    return _quad(lambda x2: g(x2) * float(m2.density(x2)), np.concatenate([m2.edges, F.x2_knots]))


def x1_minus_x2():
    return TestFunction2D.from_callable(lambda x1, x2: x1 - x2, [0.0, 1.0], [0.0, 1.0])


def random_bilinear(rng, x2_end: float = 1.0):
    return TestFunction2D(np.linspace(0.0, 1.0, 3), np.linspace(0.0, x2_end, 3), rng.uniform(-1.0, 1.0, (3, 3)))


@pytest.mark.parametrize(
    "q, expected",
    [
        (1.0, 1.0 / 3.0),
        (1.5, (2.0 / 8.75) ** (1.0 / 1.5)),
        (3.0, 0.1 ** (1.0 / 3.0)),
    ],
)
def test_gauge_norm_across_an_interior_zero_line(lebesgue, q, expected):
    # int int |x1 - x2|^q = 2 / ((q + 1)(q + 2))
    pm = ProductMeasure(lebesgue, lebesgue)
    assert gauge_norm_2d(PowerYoung(q), pm, x1_minus_x2()) == pytest.approx(expected, rel=1e-8)
    assert lp_norm_2d(pm, q, x1_minus_x2()) == pytest.approx(expected, rel=1e-8)


def test_fractional_power_on_weighted_line():
    m = WeightedMeasure1D.power_law(0.0, 1.0, 0.5)
    f = TestFunction1D([0.0, 1.0], [-1.0, 2.0])
    expected = row_integral(lambda v: abs(v) ** 1.5, m, TestFunction2D.from_x1_function(f, [0.0, 1.0]), 0.5)
    assert lp_norm(m, 1.5, f) == pytest.approx(expected ** (1.0 / 1.5), rel=1e-9)
    assert gauge_norm_1d(PowerYoung(1.5), m, f) == pytest.approx(expected ** (1.0 / 1.5), rel=1e-9)


def test_tabulated_phi_on_x2_function_matches_one_variable_norm(lebesgue):
    phi = TabulatedYoung.from_knots([(0.0, 0.0), (1.0, 0.5), (2.0, 3.0)])
    g = TestFunction1D([0.0, 0.4, 1.0], [-1.0, 2.5, 0.5])
    F = TestFunction2D.from_x2_function(g, [0.0, 0.5, 1.0])
    expected = gauge_norm_1d(phi, lebesgue, g)
    assert gauge_norm_2d(phi, ProductMeasure(lebesgue, lebesgue), F) == pytest.approx(expected, rel=1e-9)


def test_tabulated_phi_modular_at_two_variable_norm_is_one(lebesgue):
    phi = TabulatedYoung.from_knots([(0.0, 0.0), (1.0, 0.5), (2.0, 3.0)])
    F = random_bilinear(np.random.default_rng(7)).scaled(3.0)
    k = gauge_norm_2d(phi, ProductMeasure(lebesgue, lebesgue), F)
    levels = [k * t for t in phi.kinks()]
    modular = outer_integral(
        lambda x2: row_integral(lambda v: phi(abs(v) / k), lebesgue, F, x2, levels), lebesgue, F
    )
    assert modular == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("q", [1.5, 3.0])
def test_power_gauge_matches_nested_quadrature(q):
    rng = np.random.default_rng(int(10 * q))
    m1 = WeightedMeasure1D.power_law(0.0, 1.0, 0.5)
    m2 = WeightedMeasure1D.tabulated(0.0, 2.0, [(0.0, 0.5), (1.0, 1.5), (2.0, 0.5)])
    pm = ProductMeasure(m1, m2)
    for _ in range(3):
        F = random_bilinear(rng, x2_end=2.0)
        expected = outer_integral(lambda x2: row_integral(lambda v: abs(v) ** q, m1, F, x2), m2, F) ** (1.0 / q)
        assert gauge_norm_2d(PowerYoung(q), pm, F) == pytest.approx(expected, rel=1e-8)


def test_mixed_norm_matches_nested_quadrature(lebesgue):
    m2 = WeightedMeasure1D.tabulated(0.0, 1.0, [(0.0, 2.0), (1.0, 1.0)])
    F = random_bilinear(np.random.default_rng(3))

    def row_norm(x2):
        return row_integral(lambda v: abs(v) ** 1.5, lebesgue, F, x2) ** (1.0 / 1.5)

    expected = outer_integral(lambda x2: row_norm(x2) ** 3, m2, F) ** (1.0 / 3.0)
    assert mixed_norm_pq(lebesgue, 1.5, m2, 3.0, F) == pytest.approx(expected, rel=1e-8)
    assert mixed_norm_p_phi(lebesgue, 1.5, m2, PowerYoung(3.0), F) == pytest.approx(expected, rel=1e-8)
    assert slice_gauge_integral(PowerYoung(1.5), lebesgue, m2, F) == pytest.approx(
        outer_integral(row_norm, m2, F), rel=1e-8
    )


def test_slice_gauge_integral_of_product_function(lebesgue, power2):
    # int x2 ||x1||_{L^2} dx2
    assert slice_gauge_integral(power2, lebesgue, lebesgue, x1x2()) == pytest.approx(0.5 / math.sqrt(3.0), rel=1e-10)
