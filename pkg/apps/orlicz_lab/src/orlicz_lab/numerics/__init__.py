"""Young functions, weighted measures, test functions, gauge and mixed norms, Poincare constants."""

from orlicz_lab.numerics.constants import KConstantReport, k1_phi, kp_phi, kp_phi_tilde, poincare_constant
from orlicz_lab.numerics.functions import TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import ProductMeasure, WeightedMeasure1D, tail_moment
from orlicz_lab.numerics.norms import (
    gauge_norm_1d,
    gauge_norm_2d,
    iterated_gauge,
    lp_norm,
    mixed_norm_hat,
    mixed_norm_p_phi,
    mixed_norm_pq,
    slice_gauge_integral,
)
from orlicz_lab.numerics.young import (
    ExpPowerYoung,
    PowerYoung,
    TabulatedYoung,
    YoungFunction,
    check_gamma_convex,
    check_submultiplicative,
)

__all__ = [
    "KConstantReport",
    "k1_phi",
    "kp_phi",
    "kp_phi_tilde",
    "poincare_constant",
    "TestFunction1D",
    "TestFunction2D",
    "ProductMeasure",
    "WeightedMeasure1D",
    "tail_moment",
    "gauge_norm_1d",
    "gauge_norm_2d",
    "iterated_gauge",
    "lp_norm",
    "mixed_norm_hat",
    "mixed_norm_p_phi",
    "mixed_norm_pq",
    "slice_gauge_integral",
    "ExpPowerYoung",
    "PowerYoung",
    "TabulatedYoung",
    "YoungFunction",
    "check_gamma_convex",
    "check_submultiplicative",
]
