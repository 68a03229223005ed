import math

import numpy as np
import pytest

from orlicz_lab.numerics.measure import WeightedMeasure1D
from orlicz_lab.numerics.quadrature import adaptive_gauss, adaptive_rule, divergence_ladder, panel_rule


@pytest.mark.parametrize("degree", [0, 1, 5, 17, 39])
def test_legendre_panel_is_exact_for_polynomials(degree):
    nodes, weights = panel_rule(0.25, 2.0)
    expected = (2.0 ** (degree + 1) - 0.25 ** (degree + 1)) / (degree + 1)
    assert np.dot(weights, nodes**degree) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("left_power, right_power", [(0.5, 0.0), (0.0, -0.5), (2.5, 1.0)])
def test_jacobi_panel_absorbs_algebraic_weight(left_power, right_power):
    lo, hi = 1.0, 3.0
    nodes, weights = panel_rule(lo, hi, 20, left_power, right_power)
    # integral of (u - lo)^a (hi - u)^b over [lo, hi] is L^{a+b+1} B(a+1, b+1)
    length = hi - lo
    beta = math.gamma(left_power + 1) * math.gamma(right_power + 1) / math.gamma(left_power + right_power + 2)
    expected = length ** (left_power + right_power + 1) * beta
    assert np.sum(weights) == pytest.approx(expected, rel=1e-12)
    assert np.all((nodes > lo) & (nodes < hi))


def test_adaptive_gauss_smooth_and_oscillatory():
    assert adaptive_gauss(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-10)
    assert adaptive_gauss(lambda x: np.cos(40.0 * x), 0.0, 1.0) == pytest.approx(math.sin(40.0) / 40.0, abs=1e-10)
    assert adaptive_gauss(np.exp, 1.0, 1.0) == 0.0


def test_adaptive_gauss_result_is_deterministic():
    f = lambda x: np.abs(x - 0.3) ** 0.5
    assert adaptive_gauss(f, 0.0, 1.0) == adaptive_gauss(f, 0.0, 1.0)


def test_adaptive_rule_returns_sorted_reusable_nodes():
    f = lambda x: np.abs(x - 1.0 / 3.0) ** 1.5
    nodes, weights, values = adaptive_rule(f, [0.0, 1.0 / 3.0, 1.0], atol=0.0)
    expected = ((1.0 / 3.0) ** 2.5 + (2.0 / 3.0) ** 2.5) / 2.5
    assert np.all(np.diff(nodes) > 0.0)
    np.testing.assert_array_equal(values, f(nodes))
    assert np.dot(weights, values) == pytest.approx(expected, rel=1e-10)


def test_adaptive_rule_on_weighted_panels():
    # int_0^1 x^{-1/2} (1 + x) dx, the endpoint factor absorbed into the Jacobi end panel
    m = WeightedMeasure1D.power_law(0.0, 1.0, -0.5)
    _, weights, values = adaptive_rule(lambda x: 1.0 + x, m.edges, m.panel)
    assert np.dot(weights, values) == pytest.approx(8.0 / 3.0, rel=1e-12)


def test_divergence_ladder_convergent_singularity():
    value, diverged = divergence_ladder(lambda t: np.power(t, -0.5), 0.0, 1.0)
    assert not diverged
    assert value == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("power", [1.0, 1.5, 3.0])
def test_divergence_ladder_detects_divergence(power):
    value, diverged = divergence_ladder(lambda t: np.power(t, -power), 0.0, 1.0)
    assert diverged
    assert value == math.inf


def test_divergence_ladder_toward_right_endpoint():
    value, diverged = divergence_ladder(lambda t: np.power(1.0 - t, -0.5), 1.0, 0.0)
    assert not diverged
    assert value == pytest.approx(2.0, rel=1e-6)
