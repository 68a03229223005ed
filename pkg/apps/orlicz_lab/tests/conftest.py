from pathlib import Path

import numpy as np
import pytest

from orlicz_lab.numerics.measure import WeightedMeasure1D
from orlicz_lab.numerics.young import PowerYoung
from orlicz_lab.verify.checks import Experiment


CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def lebesgue_experiment(phi=None, p: float = 2.0, **overrides) -> Experiment:
    m = WeightedMeasure1D.lebesgue(0.0, 1.0)
    fields = dict(phi=phi or PowerYoung(2.0), mu1=m, mu2=m, nu1=m, nu2=m, w1=m, w2=m, p1=p, p2=p, s1=p, name="lebesgue")
    fields.update(overrides)
    return Experiment(**fields)


@pytest.fixture
def lebesgue():
    return WeightedMeasure1D.lebesgue(0.0, 1.0)


@pytest.fixture
def power2():
    return PowerYoung(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def configs_dir():
    return CONFIGS
