"""Luxemburg gauge norms, weighted L^p norms and repeated (mixed) norms.

One-variable integrals run on composite rules split at the knots, sign
changes and Phi-kink crossings of the integrand and graded geometrically
toward its zeros when |t|^q is not a polynomial there. Two-variable
integrals are iterated: such a rule along every x1 row, inside an adaptive
rule over x2 whose first panels end where zero and kink curves meet the
cell boundaries. What remains is the adaptive tolerance EPS_QUAD of the
outer rule, the grading error at zeros (far below it) and rounding.
"""

from collections.abc import Callable

import logging

import numpy as np
from scipy.optimize import brentq

from orlicz_lab.core.errors import OverflowDomain, ZeroMassError
from orlicz_lab.numerics.functions import PiecewiseBilinear, PiecewiseLinear, TestFunction1D
from orlicz_lab.numerics.measure import GRADING_LEVELS, ProductMeasure, WeightedMeasure1D
from orlicz_lab.numerics.quadrature import GAUSS_ORDER, _jacobi, _legendre, adaptive_rule
from orlicz_lab.numerics.young import YoungFunction


logger = logging.getLogger(__name__)

EPS_NORM = 1e-13
_MAX_EXPANSIONS = 2100
_MAX_BISECTIONS = 200
_MODULAR_CEILING = 1e300
_MERGE_TOL = 1e-14

RowReduction = Callable[[np.ndarray], np.ndarray]


def solve_gauge(modular: Callable[[float], float], guess: float) -> float:
    """Smallest k > 0 with modular(k) <= 1, for a nonincreasing modular.

    The bracket starts at `guess`, is widened by doubling and halving, and is
    then closed by Brent's method.
    """
    if not guess > 0.0 or not np.isfinite(guess):
        guess = 1.0
    hi = guess
    for _ in range(_MAX_EXPANSIONS):
        if modular(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise OverflowDomain("gauge bracket could not be expanded below the domain cap")
    lo = 0.5 * hi
    for _ in range(_MAX_EXPANSIONS):
        if modular(lo) > 1.0:
            break
        hi, lo = lo, 0.5 * lo
    else:
        return 0.0
    logger.debug(f"gauge bracket [{lo:.6g}, {hi:.6g}] from guess {guess:.6g}")
    return float(
        brentq(
            lambda k: min(modular(k), _MODULAR_CEILING) - 1.0,
            lo,
            hi,
            xtol=np.finfo(float).tiny,
            rtol=EPS_NORM,
            maxiter=_MAX_BISECTIONS,
        )
    )


def solve_gauges(modular: Callable[[np.ndarray], np.ndarray], guess) -> np.ndarray:
    """Vectorized `solve_gauge`: entry i solves modular(k)[i] = 1 by bisection.

    Entries with a zero or non-finite guess are reported as 0.
    """
    guess = np.asarray(guess, dtype=float)
    live = (guess > 0.0) & np.isfinite(guess)
    hi = np.where(live, guess, 1.0)
    for _ in range(_MAX_EXPANSIONS):
        over = live & (modular(hi) > 1.0)
        if not np.any(over):
            break
        hi = np.where(over, 2.0 * hi, hi)
    else:
        raise OverflowDomain("gauge bracket could not be expanded below the domain cap")
    lo = 0.5 * hi
    for _ in range(_MAX_EXPANSIONS):
        under = live & (modular(lo) <= 1.0)
        if not np.any(under):
            break
        hi, lo = np.where(under, lo, hi), np.where(under, 0.5 * lo, lo)
    for _ in range(_MAX_BISECTIONS):
        if np.all(hi - lo <= EPS_NORM * hi):
            break
        mid = 0.5 * (lo + hi)
        above = modular(mid) > 1.0
        lo, hi = np.where(above, mid, lo), np.where(above, hi, mid)
    return np.where(live, hi, 0.0)


def sample_gauge(phi: YoungFunction, values, weights) -> float:
    """Gauge norm of a function known through a fixed quadrature rule."""
    values = np.abs(np.asarray(values, dtype=float))
    weights = np.asarray(weights, dtype=float)
    energy = float(np.dot(weights, values * values))
    if energy == 0.0:
        return 0.0
    if phi.is_pure_power:
        return float(sample_lp(values, weights, phi.q))

    def modular(k: float) -> float:
        return _weighted_sum(weights, phi.evaluate_unbounded(values / k))

    return solve_gauge(modular, np.sqrt(energy))


def sample_lp(values, weights, p: float, axis=None):
    values = np.abs(np.asarray(values, dtype=float))
    return np.power(np.sum(weights * np.power(values, p), axis=axis), 1.0 / p)


def _weighted_sum(weights, values, axis=None):
    # padded panels carry zero weight and may sit where values overflow
    with np.errstate(invalid="ignore", over="ignore"):
        return np.sum(np.where(weights > 0.0, weights * values, 0.0), axis=axis)


def _require_exponent(p: float) -> None:
    if not p >= 1.0 or not np.isfinite(p):
        raise ValueError(f"exponent must satisfy 1 <= p < inf, got {p}")


def _graded(exponent: float) -> bool:
    return not float(exponent).is_integer()


def _kink_levels(phi: YoungFunction, k) -> np.ndarray | None:
    """Levels |f| = k * kink, one row per entry of k."""
    if not phi.kinks():
        return None
    return np.multiply.outer(np.atleast_1d(np.asarray(k, dtype=float)), np.asarray(phi.kinks()))


# rules


def _merge(a: float, b: float, points) -> np.ndarray:
    """Sorted points of [a, b] with near duplicates dropped, starting at a and ending at b."""
    points = np.unique(np.clip(np.concatenate([[a], np.asarray(points, dtype=float).ravel(), [b]]), a, b))
    tol = _MERGE_TOL * (b - a)
    kept = [a]
    for point in points[1:]:
        if point - kept[-1] > tol:
            kept.append(float(point))
    kept[-1] = b
    return np.asarray(kept)


def _merged_edges(m: WeightedMeasure1D, knots) -> np.ndarray:
    return _merge(m.a, m.b, np.concatenate([m.edges, np.asarray(knots, dtype=float)]))


def _crossings(lo, width, left, right, level) -> np.ndarray:
    """Where each linear piece equals `level` strictly inside its cell, nan elsewhere."""
    a, b = left - level, right - level
    with np.errstate(divide="ignore", invalid="ignore"):
        point = lo + width * a / (a - b)
    return np.where(a * b < 0.0, point, np.nan)


def piecewise_linear_rule(
    m: WeightedMeasure1D,
    edges,
    left,
    right,
    levels=None,
    graded: bool = False,
    order: int = GAUSS_ORDER,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes, weights and values for integrating h(f) dm, one row per function.

    Every row f is linear on each cell of `edges` (which must refine the
    measure's edges), from left[n, c] to right[n, c]. Cells are split where
    f crosses 0 and +-levels[n, :]; with `graded` the panels next to a zero
    are refined geometrically toward it. Padding panels have zero weight.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    width = hi - lo
    left, right = np.atleast_2d(left), np.atleast_2d(right)

    zero = _crossings(lo, width, left, right, 0.0)
    cuts = [zero[..., None]]
    if levels is not None:
        levels = np.atleast_2d(levels)
        for column in levels.T:
            for target in (column[:, None], -column[:, None]):
                cuts.append(_crossings(lo, width, left, right, target)[..., None])
    if graded:
        anchor = np.where((left == 0.0) & (right != 0.0), lo, np.nan)
        anchor = np.where((right == 0.0) & (left != 0.0), hi, anchor)
        anchor = np.where(np.isnan(zero), anchor, zero)[..., None]
        fractions = 2.0 ** -np.arange(1, GRADING_LEVELS + 1)
        cuts.append(anchor - (anchor - lo[:, None]) * fractions)
        cuts.append(anchor + (hi[:, None] - anchor) * fractions)

    cuts = np.concatenate(cuts, axis=-1)
    cuts = np.sort(np.clip(np.where(np.isnan(cuts), hi[:, None], cuts), lo[:, None], hi[:, None]), axis=-1)
    rows = left.shape[0]
    bounds = np.concatenate(
        [np.broadcast_to(lo[:, None], (rows, lo.size, 1)), cuts, np.broadcast_to(hi[:, None], (rows, hi.size, 1))],
        axis=-1,
    )
    a, b = bounds[..., :-1], bounds[..., 1:]
    half = 0.5 * (b - a)

    x, w = _legendre(order)
    nodes = a[..., None] + half[..., None] * (x + 1.0)
    weights = half[..., None] * w
    skip_left = np.zeros(a.shape, dtype=bool)
    skip_right = np.zeros(a.shape, dtype=bool)
    if m.left_power != 0.0:
        skip_left[:, 0] = (a[:, 0] == lo[0]) & (b[:, 0] > a[:, 0])
        xj, wj = _jacobi(order, m.left_power, 0.0)
        nodes = np.where(skip_left[..., None], a[..., None] + half[..., None] * (xj + 1.0), nodes)
        weights = np.where(skip_left[..., None], np.power(half, 1.0 + m.left_power)[..., None] * wj, weights)
    if m.right_power != 0.0:
        skip_right[:, -1] = (b[:, -1] == hi[-1]) & (b[:, -1] > a[:, -1]) & ~skip_left[:, -1]
        xj, wj = _jacobi(order, 0.0, m.right_power)
        nodes = np.where(skip_right[..., None], a[..., None] + half[..., None] * (xj + 1.0), nodes)
        weights = np.where(skip_right[..., None], np.power(half, 1.0 + m.right_power)[..., None] * wj, weights)

    u = nodes - m.a
    density = m._density(u)
    if m.left_power != 0.0:
        density = np.where(skip_left[..., None], m._density(u, skip_left=True), density)
    if m.right_power != 0.0:
        density = np.where(skip_right[..., None], m._density(u, skip_right=True), density)
    with np.errstate(invalid="ignore"):
        weights = np.where(half[..., None] > 0.0, weights * density, 0.0)

    slope = (right - left) / width
    values = left[..., None, None] + slope[..., None, None] * (nodes - lo[:, None, None])
    return nodes.reshape(rows, -1), weights.reshape(rows, -1), values.reshape(rows, -1)


def _line_rule(m: WeightedMeasure1D, f: PiecewiseLinear, levels=None, graded: bool = False):
    f.require_interval(m.a, m.b)
    edges = _merged_edges(m, f.knots)
    left, right = f.pieces(edges)
    _, weights, values = piecewise_linear_rule(m, edges, left, right, levels, graded)
    return weights[0], values[0]


def _row_rule(m: WeightedMeasure1D, F: PiecewiseBilinear, edges, x2, levels=None, graded: bool = False):
    left, right = F.pieces_along_x1(edges, x2)
    _, weights, values = piecewise_linear_rule(m, edges, left, right, levels, graded)
    return weights, values


def _outer_edges(m: WeightedMeasure1D, F: PiecewiseBilinear, edges, levels=()) -> np.ndarray:
    """x2 panel ends: knots, measure edges and the points where F = 0 or |F| = level on a cell boundary."""
    points = [m.edges, F.x2_knots]
    for line in F.boundary_lines(edges):
        points.append(line.zero_crossings())
        points.extend(line.level_crossings(level) for level in levels)
    return _merge(m.a, m.b, np.concatenate(points))


def _adaptive_integral(f: RowReduction, m: WeightedMeasure1D, edges) -> float:
    # relative only, so that norms stay homogeneous for tiny functions
    _, weights, values = adaptive_rule(f, edges, m.panel, atol=0.0)
    return float(_weighted_sum(weights, values))


class _Memo:
    """Caches a vectorized reduction by abscissa; repeated modular evaluations revisit the same nodes."""

    def __init__(self, reduction: RowReduction):
        self.reduction = reduction
        self.cache: dict[float, float] = {}

    def __call__(self, x) -> np.ndarray:
        keys = np.asarray(x, dtype=float).tolist()
        missing = sorted({key for key in keys if key not in self.cache})
        if missing:
            self.cache.update(zip(missing, np.asarray(self.reduction(np.asarray(missing)), dtype=float).tolist()))
        return np.array([self.cache[key] for key in keys])


def _iterated_integral(m1, m2, F: PiecewiseBilinear, h: RowReduction, levels=None, graded: bool = False) -> float:
    """int int h(F) dm1 dm2: exact rows over x1 inside an adaptive rule over x2."""
    edges = _merged_edges(m1, F.x1_knots)
    flat = () if levels is None else np.asarray(levels).ravel()

    def rows(x2):
        weights, values = _row_rule(m1, F, edges, x2, levels, graded)
        with np.errstate(over="ignore"):
            return _weighted_sum(weights, h(values), axis=1)

    return _adaptive_integral(rows, m2, _outer_edges(m2, F, edges, flat))


def _row_lp(m: WeightedMeasure1D, F: PiecewiseBilinear, edges, p: float) -> RowReduction:
    graded = _graded(p)

    def reduce(x2):
        weights, values = _row_rule(m, F, edges, x2, graded=graded)
        return np.power(_weighted_sum(weights, np.power(np.abs(values), p), axis=1), 1.0 / p)

    return reduce


def _row_gauges(phi: YoungFunction, m: WeightedMeasure1D, F: PiecewiseBilinear, edges) -> RowReduction:
    graded = not phi.smooth_at_zero
    if phi.is_pure_power:
        return _row_lp(m, F, edges, phi.q)

    def reduce(x2):
        weights, values = _row_rule(m, F, edges, x2, graded=graded)
        energy = np.sqrt(_weighted_sum(weights, values * values, axis=1))

        if not phi.kinks():
            def modular(k):
                return _weighted_sum(weights, phi.evaluate_unbounded(values / k[:, None]), axis=1)
        else:
            def modular(k):
                w, v = _row_rule(m, F, edges, x2, _kink_levels(phi, k), graded)
                return _weighted_sum(w, phi.evaluate_unbounded(v / k[:, None]), axis=1)

        return solve_gauges(modular, energy)

    return reduce


def _outer_lp(m: WeightedMeasure1D, edges, inner: RowReduction, p: float) -> float:
    return _adaptive_integral(lambda x: np.power(inner(x), p), m, edges) ** (1.0 / p)


def _outer_gauge(phi: YoungFunction, m: WeightedMeasure1D, edges, inner: RowReduction) -> float:
    """Gauge norm over m of x -> inner(x), the inner values cached across modular evaluations."""
    if phi.is_pure_power:
        return _outer_lp(m, edges, inner, phi.q)
    inner = _Memo(inner)
    guess = _outer_lp(m, edges, inner, 2.0)
    if guess == 0.0:
        return 0.0

    def modular(k: float) -> float:
        return _adaptive_integral(lambda x: phi.evaluate_unbounded(inner(x) / k), m, edges)

    return solve_gauge(modular, guess)


# one variable


def modular_1d(phi: YoungFunction, m: WeightedMeasure1D, f: PiecewiseLinear, k: float) -> float:
    """int_I Phi(f/k) dm; raises OverflowDomain when |f|/k passes the domain cap."""
    if not k > 0.0:
        raise ValueError("k must be positive")
    weights, values = _line_rule(m, f, _kink_levels(phi, k), graded=not phi.smooth_at_zero)
    if f.sup_abs() / k > phi.domain_cap:
        raise OverflowDomain(f"|f|/k = {f.sup_abs() / k:g} exceeds domain_cap")
    return float(_weighted_sum(weights, phi(values / k)))


def gauge_norm_1d(phi: YoungFunction, m: WeightedMeasure1D, f: PiecewiseLinear) -> float:
    """inf{k > 0 : int Phi(f/k) dm <= 1}."""
    f.require_interval(m.a, m.b)
    if m.total_mass == 0.0:
        logger.warning(f"gauge norm over a zero-mass measure on [{m.a}, {m.b}] reported as 0")
        return 0.0
    if f.is_zero():
        return 0.0
    graded = not phi.smooth_at_zero
    weights, values = _line_rule(m, f, graded=graded)
    if not phi.kinks():
        return sample_gauge(phi, values, weights)

    def modular(k: float) -> float:
        w, v = _line_rule(m, f, _kink_levels(phi, k), graded)
        return float(_weighted_sum(w, phi.evaluate_unbounded(v / k)))

    return solve_gauge(modular, float(np.sqrt(_weighted_sum(weights, values * values))))


def lp_norm(m: WeightedMeasure1D, p: float, f: PiecewiseLinear) -> float:
    """(int |f|^p dm)^{1/p}."""
    _require_exponent(p)
    weights, values = _line_rule(m, f, graded=_graded(p))
    return float(sample_lp(values, weights, p))


# two variables


def gauge_norm_2d(phi: YoungFunction, pm: ProductMeasure, F: PiecewiseBilinear) -> float:
    m1, m2 = pm.first, pm.second
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    if pm.total_mass == 0.0:
        logger.warning("gauge norm over a zero-mass product measure reported as 0")
        return 0.0
    if F.is_zero():
        return 0.0
    graded = not phi.smooth_at_zero
    if phi.is_pure_power:
        q = phi.q
        return _iterated_integral(m1, m2, F, lambda v: np.power(np.abs(v), q), graded=graded) ** (1.0 / q)

    def modular(k: float) -> float:
        return _iterated_integral(
            m1, m2, F, lambda v: phi.evaluate_unbounded(v / k), _kink_levels(phi, k), graded
        )

    guess = _iterated_integral(m1, m2, F, lambda v: v * v) ** 0.5
    return solve_gauge(modular, guess)


def lp_norm_2d(pm: ProductMeasure, p: float, F: PiecewiseBilinear) -> float:
    _require_exponent(p)
    m1, m2 = pm.first, pm.second
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    return _iterated_integral(m1, m2, F, lambda v: np.power(np.abs(v), p), graded=_graded(p)) ** (1.0 / p)


def mixed_norm_p_phi(
    m1: WeightedMeasure1D, p1: float, m2: WeightedMeasure1D, phi: YoungFunction, F: PiecewiseBilinear
) -> float:
    """|| ||F||_{L^p1(m1)} ||_{L^Phi(m2)}: inner over x1, outer gauge over x2."""
    _require_exponent(p1)
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    if m2.total_mass == 0.0:
        logger.warning("outer measure of a mixed norm has zero mass")
        return 0.0
    edges = _merged_edges(m1, F.x1_knots)
    return _outer_gauge(phi, m2, _outer_edges(m2, F, edges), _row_lp(m1, F, edges, p1))


def mixed_norm_hat(
    m1: WeightedMeasure1D, s1: float, m2: WeightedMeasure1D, p2: float, F: PiecewiseBilinear
) -> float:
    """|| ||F||_{L^p2(m2)} ||_{L^s1(m1)}: inner over x2, outer over x1."""
    _require_exponent(s1)
    _require_exponent(p2)
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    G = F.transposed()
    edges = _merged_edges(m2, G.x1_knots)
    return _outer_lp(m1, _outer_edges(m1, G, edges), _row_lp(m2, G, edges, p2), s1)


def mixed_norm_pq(
    m1: WeightedMeasure1D, p1: float, m2: WeightedMeasure1D, p2: float, F: PiecewiseBilinear
) -> float:
    """|| ||F||_{L^p1(m1)} ||_{L^p2(m2)}: inner over x1, outer over x2."""
    _require_exponent(p1)
    _require_exponent(p2)
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    edges = _merged_edges(m1, F.x1_knots)
    return _outer_lp(m2, _outer_edges(m2, F, edges), _row_lp(m1, F, edges, p1), p2)


def iterated_gauge(phi: YoungFunction, m1: WeightedMeasure1D, m2: WeightedMeasure1D, F: PiecewiseBilinear) -> float:
    """|| ||F||_{L^Phi(m1)} ||_{L^Phi(m2)}."""
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    if m1.total_mass == 0.0 or m2.total_mass == 0.0:
        logger.warning("iterated gauge over a zero-mass measure reported as 0")
        return 0.0
    edges = _merged_edges(m1, F.x1_knots)
    return _outer_gauge(phi, m2, _outer_edges(m2, F, edges), _row_gauges(phi, m1, F, edges))


def slice_gauge_integral(
    phi: YoungFunction, m1: WeightedMeasure1D, m2: WeightedMeasure1D, F: PiecewiseBilinear
) -> float:
    """int ||F(., x2)||_{L^Phi(m1)} dm2(x2)."""
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    if m1.total_mass == 0.0:
        return 0.0
    edges = _merged_edges(m1, F.x1_knots)
    return _adaptive_integral(_row_gauges(phi, m1, F, edges), m2, _outer_edges(m2, F, edges))


def step_gauge_norm(phi: YoungFunction, m: WeightedMeasure1D, x: float, right_value: float, left_value: float) -> float:
    """Gauge norm of the two-piece function left_value on [a, x), right_value on [x, b].

    The modular is m[x, b] Phi(right/k) + m[a, x] Phi(left/k), read off the
    cumulative masses.
    """
    left_mass = m.cumulative(x)
    right_mass = m.total_mass - left_mass
    right_value, left_value = abs(right_value), abs(left_value)

    def modular(k: float) -> float:
        pair = phi.evaluate_unbounded(np.array([right_value, left_value]) / k)
        return float(right_mass * pair[0] + left_mass * pair[1])

    energy = right_mass * right_value**2 + left_mass * left_value**2
    if energy == 0.0:
        return 0.0
    return solve_gauge(modular, float(np.sqrt(energy)))


# averages


def _tensor_rule(m1: WeightedMeasure1D, m2: WeightedMeasure1D, F: PiecewiseBilinear):
    """Weights along each axis and F on the tensor nodes; exact for the polynomial integrand of a mean."""
    F.require_intervals((m1.a, m1.b), (m2.a, m2.b))
    n1, w1 = m1.rule(F.x1_breakpoints())
    n2, w2 = m2.rule(F.x2_breakpoints())
    return w1, w2, F(n1[:, None], n2[None, :])


def mean_1d(m: WeightedMeasure1D, f: PiecewiseLinear) -> float:
    """(1/m(I)) int f dm."""
    mass = m.total_mass
    if mass == 0.0:
        raise ZeroMassError(f"average over a zero-mass measure on [{m.a}, {m.b}]")
    weights, values = _line_rule(m, f)
    return float(np.dot(weights, values)) / mass


def mean_2d(pm: ProductMeasure, F: PiecewiseBilinear) -> float:
    mass = pm.total_mass
    if mass == 0.0:
        raise ZeroMassError("average over a zero-mass product measure")
    w1, w2, values = _tensor_rule(pm.first, pm.second, F)
    return float(w1 @ values @ w2) / mass


def average_over_x1(m1: WeightedMeasure1D, F: PiecewiseBilinear) -> TestFunction1D:
    """x2 -> (1/m1(I)) int F(y1, x2) dm1(y1); exact since F is linear in x2 between knots."""
    mass = m1.total_mass
    if mass == 0.0:
        raise ZeroMassError("average over a zero-mass measure")
    F.require_intervals((m1.a, m1.b), F.intervals[1])
    nodes, weights = m1.rule(F.x1_breakpoints())
    values = weights @ F(nodes[:, None], F.x2_knots[None, :]) / mass
    return TestFunction1D(F.x2_knots, values)


def integrate_over_x2(m2: WeightedMeasure1D, F: PiecewiseBilinear) -> TestFunction1D:
    """x1 -> int F(x1, t) dm2(t); exact since F is linear in x1 between knots."""
    F.require_intervals(F.intervals[0], (m2.a, m2.b))
    nodes, weights = m2.rule(F.x2_breakpoints())
    values = F(F.x1_knots[:, None], nodes[None, :]) @ weights
    return TestFunction1D(F.x1_knots, values)
