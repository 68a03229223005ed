"""Checks of the two-dimensional Poincare inequality, its lemmas and the sharpness probe."""

from orlicz_lab.verify.battery import CheckKind, Family, build_family, default_grid, run_experiment
from orlicz_lab.verify.checks import (
    Experiment,
    VerificationReport,
    check_product_norm,
    check_x2_sandwich,
    check_x1_sandwich,
    check_minkowski,
    check_necessity_reduction,
    check_poincare_2d,
)
from orlicz_lab.verify.sharpness import check_sharpness, sharpness_probe

__all__ = [
    "CheckKind",
    "Family",
    "build_family",
    "default_grid",
    "run_experiment",
    "Experiment",
    "VerificationReport",
    "check_product_norm",
    "check_x2_sandwich",
    "check_x1_sandwich",
    "check_minkowski",
    "check_necessity_reduction",
    "check_poincare_2d",
    "check_sharpness",
    "sharpness_probe",
]
