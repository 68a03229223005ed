import math

import numpy as np
import pytest

from orlicz_lab.numerics.measure import WeightedMeasure1D
from orlicz_lab.verify.sharpness import DECADES, check_sharpness, ramp, sharpness_probe

from conftest import lebesgue_experiment


def test_ramp_values():
    g = ramp(0.0, 1.0, 0.2, 0.5)
    np.testing.assert_allclose(g([0.0, 0.2, 0.45, 0.7, 1.0]), [0.0, 0.0, 0.5, 1.0, 1.0])
    clipped = ramp(0.0, 1.0, 0.9, 0.5)
    assert clipped(1.0) == pytest.approx(0.2)


@pytest.mark.parametrize("axis", [1, 2])
def test_finite_constant_is_never_beaten(axis):
    report = check_sharpness(lebesgue_experiment(), axis=axis, family_size=5)
    assert report.passed
    assert report.name == f"lebesgue/sharpness[x{axis}]"
    assert report.grid == f"{len(DECADES)}x5"
    assert report.diagnostics["sup_ratio"] <= 1.0 + 1e-5
    assert report.diagnostics["k_tilde"] == pytest.approx(0.375, rel=1e-5)
    assert report.flags == []


def test_divergent_weight_makes_required_constant_grow():
    w = WeightedMeasure1D.power_law(0.0, 1.0, 4.0)
    exp = lebesgue_experiment(w2=w)
    probe = sharpness_probe(exp, axis=2, family_size=6)
    assert probe.k_tilde_infinite
    assert math.isinf(probe.sufficient_constant)
    assert probe.monotone_growth
    assert len(probe.per_decade) == len(DECADES)
    assert len(probe.rows) == len(DECADES) * 6

    report = check_sharpness(exp, axis=2, family_size=6, seed=3)
    assert report.passed
    assert set(report.flags) == {"infinite_constant", "k_tilde_infinite"}
    assert report.diagnostics["monotone_growth"]


def test_bad_axis():
    with pytest.raises(ValueError):
        sharpness_probe(lebesgue_experiment(), axis=3)
