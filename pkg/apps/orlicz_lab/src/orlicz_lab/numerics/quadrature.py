"""Panel quadrature: Gauss rules, adaptive panels and the divergence ladder."""

from collections.abc import Callable
from functools import lru_cache

import logging

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi


logger = logging.getLogger(__name__)

GAUSS_ORDER = 20
EPS_QUAD = 1e-9
ABS_QUAD = 1e-12
DIV_FACTOR = 10.0
LADDER_LEVELS = 40

Integrand = Callable[[np.ndarray], np.ndarray]
PanelRule = Callable[[float, float, int], tuple[np.ndarray, np.ndarray]]


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    return nodes, weights


@lru_cache(maxsize=None)
def _jacobi(order: int, left_power: float, right_power: float) -> tuple[np.ndarray, np.ndarray]:
    # scipy's weight is (1 - x)**alpha * (1 + x)**beta on [-1, 1]
    nodes, weights = roots_jacobi(order, right_power, left_power)
    return nodes, weights


def panel_rule(
    lo: float,
    hi: float,
    order: int = GAUSS_ORDER,
    left_power: float = 0.0,
    right_power: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the integral over [lo, hi] of (u-lo)^left_power (hi-u)^right_power g(u).

    The algebraic factors are absorbed into the weights, so the caller only
    evaluates the smooth remainder g at the returned nodes.
    """
    half = 0.5 * (hi - lo)
    if left_power == 0.0 and right_power == 0.0:
        x, w = _legendre(order)
        return lo + half * (x + 1.0), half * w

    x, w = _jacobi(order, float(left_power), float(right_power))
    scale = half ** (1.0 + left_power + right_power)
    return lo + half * (x + 1.0), scale * w


def adaptive_rule(
    f: Integrand,
    breakpoints,
    panel: PanelRule = panel_rule,
    rtol: float = EPS_QUAD,
    atol: float = ABS_QUAD,
    order: int = 10,
    max_panels: int = 4000,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite rule over consecutive breakpoints, refined until n vs 2n estimates agree.

    Each generation of panels is evaluated in a single call of `f`. A panel
    whose estimate misses its width share of the tolerance is halved.
    Returns the 2n-point nodes, weights and integrand values of the accepted
    panels, left to right.
    """
    edges = np.asarray(breakpoints, dtype=float)
    empty = np.empty(0)
    if edges.size < 2 or not edges[-1] > edges[0]:
        return empty, empty, empty
    span = float(edges[-1] - edges[0])

    active = [(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    accepted: list[tuple[float, np.ndarray, np.ndarray, np.ndarray]] = []
    target = None
    panels = 0
    while active:
        coarse = [panel(a, b, order) for a, b in active]
        fine = [panel(a, b, 2 * order) for a, b in active]
        x = np.concatenate([nodes for nodes, _ in coarse] + [nodes for nodes, _ in fine])
        with np.errstate(invalid="ignore", over="ignore"):
            fx = np.asarray(f(x), dtype=float)
            split = len(active) * order
            coarse_sums = np.sum(np.stack([w for _, w in coarse]) * fx[:split].reshape(len(active), order), axis=1)
            fine_values = fx[split:].reshape(len(active), 2 * order)
            fine_sums = np.sum(np.stack([w for _, w in fine]) * fine_values, axis=1)
        if target is None:
            total = float(np.sum(fine_sums))
            target = max(rtol * abs(total), atol) if np.isfinite(total) else atol

        refined = []
        for (a, b), (nodes, weights), values, value, rough in zip(active, fine, fine_values, fine_sums, coarse_sums):
            panels += 1
            if (
                not np.isfinite(value)
                or abs(value - rough) <= target * (b - a) / span
                or panels >= max_panels
                or b - a <= 1e-15 * span
            ):
                accepted.append((a, nodes, weights, values))
            else:
                mid = 0.5 * (a + b)
                refined.extend([(a, mid), (mid, b)])
        active = refined

    if panels >= max_panels:
        logger.debug(f"adaptive rule hit the panel budget on [{edges[0]}, {edges[-1]}]")

    accepted.sort(key=lambda item: item[0])
    return (
        np.concatenate([item[1] for item in accepted]),
        np.concatenate([item[2] for item in accepted]),
        np.concatenate([item[3] for item in accepted]),
    )


def adaptive_gauss(
    f: Integrand,
    lo: float,
    hi: float,
    rtol: float = EPS_QUAD,
    atol: float = ABS_QUAD,
    order: int = 10,
    max_panels: int = 4000,
) -> float:
    """Integral of f over [lo, hi] by `adaptive_rule` started from a single panel."""
    if hi <= lo:
        return 0.0
    _, weights, values = adaptive_rule(f, [lo, hi], panel_rule, rtol, atol, order, max_panels)
    with np.errstate(invalid="ignore"):
        return float(np.sum(weights * values))


def divergence_ladder(
    f: Integrand,
    singular: float,
    far: float,
    levels: int = LADDER_LEVELS,
    div_factor: float = DIV_FACTOR,
) -> tuple[float, bool]:
    """Integrate f between a singular point and a regular point.

    Panels shrink geometrically toward the singular point. The integral is
    declared divergent when the last three panel contributions stop
    decaying, or when the partial sum grows by more than div_factor over the
    last three levels. Otherwise the geometric tail of the remaining sliver
    is added. Returns (value, diverged); works for far < singular as well.
    """
    span = far - singular
    lo, hi = (singular, far) if span > 0 else (far, singular)
    if hi <= lo:
        return 0.0, False

    increments: list[float] = []
    partial_sums: list[float] = []
    running = 0.0
    for level in range(levels):
        outer = singular + span * 2.0 ** (-level)
        inner = singular + span * 2.0 ** (-level - 1)
        a, b = (inner, outer) if span > 0 else (outer, inner)
        piece = adaptive_gauss(f, a, b)
        if not np.isfinite(piece):
            return float("inf"), True
        increments.append(piece)
        running += piece
        partial_sums.append(running)

    tail = increments[-3:]
    if running <= 0.0:
        return 0.0, False

    if len(partial_sums) > 3 and partial_sums[-4] > 0 and partial_sums[-1] > div_factor * partial_sums[-4]:
        logger.debug(f"ladder toward {singular}: partial sums grew past {div_factor}x")
        return float("inf"), True

    ratios = [tail[i + 1] / tail[i] if tail[i] > 0 else 0.0 for i in range(len(tail) - 1)]
    if tail[-1] > 0 and all(r >= 1.0 - 1e-3 for r in ratios):
        logger.debug(f"ladder toward {singular}: contributions stopped decaying")
        return float("inf"), True

    r = ratios[-1] if ratios else 0.0
    r = min(max(r, 0.0), 0.999)
    return running + tail[-1] * r / (1.0 - r), False
