"""Ramp-function probe of how large the constant in the one-variable reduction has to be."""

import logging
import math

import numpy as np
from pydantic import BaseModel, Field

from orlicz_lab.numerics.functions import TestFunction1D, TestFunction2D
from orlicz_lab.numerics.norms import gauge_norm_2d, lp_norm, mean_1d
from orlicz_lab.verify.checks import Experiment, VerificationReport, k_tilde, make_report


logger = logging.getLogger(__name__)

DECADES = (1, 2, 3, 4, 5)


class ProbeRow(BaseModel):
    c: float = Field(..., description="Ramp start")
    delta: float = Field(..., description="Ramp width")
    lhs: float = Field(..., description="||g - avg g||_{L^Phi(mu)} on the product")
    derivative_term: float = Field(..., description="Right-hand side of the reduced inequality without its constant")
    required_constant: float = Field(..., description="lhs / derivative_term")
    ratio: float = Field(..., description="required_constant / sufficient constant")


class SharpnessReport(BaseModel):
    name: str = Field(..., description="Experiment name")
    axis: int = Field(..., description="Variable the ramps depend on")
    sufficient_constant: float = Field(..., description="C_i of the sufficiency statement")
    k_tilde: float = Field(..., description="K~_{p_i,Phi} on this axis")
    k_tilde_infinite: bool = Field(..., description="Whether K~ was declared infinite")
    sup_ratio: float = Field(..., description="Largest lhs/rhs over the family")
    per_decade: list[tuple[float, float]] = Field(..., description="(delta, max required constant) per delta decade")
    growth_factors: list[float] = Field(..., description="Ratios of successive per-decade maxima")
    monotone_growth: bool = Field(..., description="Every growth factor exceeds 1")
    rows: list[ProbeRow] = Field(default_factory=list)


def ramp(a: float, b: float, c: float, delta: float) -> TestFunction1D:
    """g(x) = clip((x - c) / delta, 0, 1) on [a, b]."""
    end = min(c + delta, b)
    knots = sorted({a, c, end, b})
    values = np.clip((np.asarray(knots) - c) / delta, 0.0, 1.0)
    return TestFunction1D(knots, values)


def _row(exp: Experiment, axis: int, g: TestFunction1D, c: float, delta: float, constant: float) -> ProbeRow:
    phi = exp.phi
    if axis == 2:
        centred = TestFunction1D(g.knots, g.values - mean_1d(exp.nu2, g))
        F = TestFunction2D.from_x2_function(centred, [exp.mu1.a, exp.mu1.b])
        nu1_mass = exp.nu1.total_mass
        prefactor = 2.0 * phi.unit_norm(exp.mu1.total_mass) / nu1_mass**exp.exponent
        derivative_term = prefactor * nu1_mass ** (1.0 / exp.s1) * lp_norm(exp.w2, exp.p2, g.derivative())
    else:
        centred = TestFunction1D(g.knots, g.values - mean_1d(exp.nu1, g))
        F = TestFunction2D.from_x1_function(centred, [exp.mu2.a, exp.mu2.b])
        derivative_term = phi.unit_norm(exp.mu2.total_mass) * lp_norm(exp.w1, exp.p1, g.derivative())
    lhs = gauge_norm_2d(phi, exp.mu, F)
    required = lhs / derivative_term if derivative_term > 0.0 else (0.0 if lhs == 0.0 else math.inf)
    ratio = 0.0 if math.isinf(constant) else required / constant
    return ProbeRow(c=c, delta=delta, lhs=lhs, derivative_term=derivative_term, required_constant=required, ratio=ratio)


def sharpness_probe(exp: Experiment, axis: int = 2, family_size: int = 8) -> SharpnessReport:
    """Sweep ramps g_c with c across the interval and widths (b - a) 10^-d.

    With K~ infinite on the probed axis the per-decade maxima of the required
    constant grow without bound; the table records how fast.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    measure = exp.mu1 if axis == 1 else exp.mu2
    a, b = measure.a, measure.b
    length = b - a
    constant = (exp.c1 if axis == 1 else exp.c2)[0]
    tilde = k_tilde(exp, axis)

    rows = []
    per_decade = []
    for decade in DECADES:
        delta = length * 10.0 ** (-decade)
        decade_rows = [
            _row(exp, axis, ramp(a, b, float(c), delta), float(c), delta, constant)
            for c in np.linspace(a, b - delta, family_size)
        ]
        rows.extend(decade_rows)
        per_decade.append((delta, max(row.required_constant for row in decade_rows)))
        logger.debug(f"sharpness axis {axis}, delta={delta:.3g}: max required constant {per_decade[-1][1]:.6g}")

    growth = [
        later / earlier if earlier > 0.0 else math.inf
        for (_, earlier), (_, later) in zip(per_decade, per_decade[1:])
    ]
    return SharpnessReport(
        name=exp.name,
        axis=axis,
        sufficient_constant=constant,
        k_tilde=tilde.value,
        k_tilde_infinite=tilde.infinite,
        sup_ratio=max(row.ratio for row in rows),
        per_decade=per_decade,
        growth_factors=growth,
        monotone_growth=all(factor > 1.0 for factor in growth),
        rows=rows,
    )


def check_sharpness(exp: Experiment, axis: int = 2, family_size: int = 8, seed: int | None = None) -> VerificationReport:
    """The largest required constant over the ramp family against the sufficient constant C_i."""
    probe = sharpness_probe(exp, axis, family_size)
    lhs = max(required for _, required in probe.per_decade)
    flags = ["infinite_constant"] if math.isinf(probe.sufficient_constant) else []
    if probe.k_tilde_infinite:
        flags.append("k_tilde_infinite")
    diagnostics = {
        "k_tilde": probe.k_tilde,
        "sup_ratio": probe.sup_ratio,
        "monotone_growth": probe.monotone_growth,
        "last_growth": probe.growth_factors[-1] if probe.growth_factors else math.nan,
    }
    return make_report(
        f"{exp.name}/sharpness[x{axis}]", lhs, probe.sufficient_constant, exp,
        diagnostics=diagnostics, flags=flags, grid=f"{len(DECADES)}x{family_size}", seed=seed,
    )
