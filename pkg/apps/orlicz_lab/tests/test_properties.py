import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orlicz_lab.numerics.functions import TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import ProductMeasure, WeightedMeasure1D
from orlicz_lab.numerics.norms import gauge_norm_1d, gauge_norm_2d, modular_1d
from orlicz_lab.numerics.young import ExpPowerYoung, PowerYoung, TabulatedYoung


PHIS = {
    "power2": PowerYoung(2.0),
    "power3.5": PowerYoung(3.5),
    "exp1": ExpPowerYoung(1.0),
    "tabulated": TabulatedYoung.from_knots([(0.0, 0.0), (0.5, 0.1), (1.0, 0.6), (2.0, 3.0)]),
}
MEASURE = WeightedMeasure1D.tabulated(0.0, 1.0, [(0.0, 0.5), (0.3, 2.0), (1.0, 1.0)])
KNOTS = np.linspace(0.0, 1.0, 6)

# tiny magnitudes underflow the energy used to seed the bracket
entries = st.floats(-5.0, 5.0, allow_nan=False).filter(lambda v: v == 0.0 or abs(v) > 1e-6)
values = st.lists(entries, min_size=KNOTS.size, max_size=KNOTS.size)
phis = st.sampled_from(sorted(PHIS))


def function(node_values) -> TestFunction1D:
    return TestFunction1D(KNOTS, node_values)


@settings(deadline=None, max_examples=40)
@given(name=phis, node_values=values, scale=st.floats(-10.0, 10.0, allow_nan=False).filter(lambda v: v == 0.0 or abs(v) > 1e-6))
def test_homogeneity(name, node_values, scale):
    phi = PHIS[name]
    f = function(node_values)
    scaled = function([scale * v for v in node_values])
    assert gauge_norm_1d(phi, MEASURE, scaled) == pytest.approx(abs(scale) * gauge_norm_1d(phi, MEASURE, f), rel=1e-8, abs=1e-12)


@settings(deadline=None, max_examples=40)
@given(name=phis, first=values, second=values)
def test_triangle_inequality(name, first, second):
    phi = PHIS[name]
    total = function([a + b for a, b in zip(first, second)])
    bound = gauge_norm_1d(phi, MEASURE, function(first)) + gauge_norm_1d(phi, MEASURE, function(second))
    assert gauge_norm_1d(phi, MEASURE, total) <= bound * (1.0 + 1e-9) + 1e-12


@settings(deadline=None, max_examples=40)
@given(name=phis, node_values=values)
def test_modular_is_one_at_the_norm_and_decreasing(name, node_values):
    phi = PHIS[name]
    f = function(node_values)
    k = gauge_norm_1d(phi, MEASURE, f)
    if k == 0.0:
        assert f.is_zero()
        return
    assert modular_1d(phi, MEASURE, f, k) == pytest.approx(1.0, rel=1e-7)
    assert modular_1d(phi, MEASURE, f, 2.0 * k) <= modular_1d(phi, MEASURE, f, 1.5 * k) <= 1.0


@settings(deadline=None, max_examples=25)
@given(
    name=phis,
    node_values=st.lists(st.floats(-3.0, 3.0, allow_nan=False), min_size=9, max_size=9),
    shift=st.floats(-2.0, 2.0, allow_nan=False),
)
def test_two_variable_norm_is_nonnegative_and_monotone(name, node_values, shift):
    phi = PHIS[name]
    pm = ProductMeasure(MEASURE, WeightedMeasure1D.lebesgue(0.0, 1.0))
    grid = np.linspace(0.0, 1.0, 3)
    F = TestFunction2D(grid, grid, np.reshape(node_values, (3, 3)))
    larger = TestFunction2D(grid, grid, np.abs(F.values) + abs(shift))
    norm = gauge_norm_2d(phi, pm, F)
    assert norm >= 0.0
    assert gauge_norm_2d(phi, pm, larger) >= norm * (1.0 - 1e-9)
