"""Weighted measures on closed intervals, cumulative masses and singular moment integrals.

Densities are held in offset coordinates u = t - a on [0, L] as

    w(u) = scale * u**left_power * (L - u)**right_power * prod(piecewise-linear factors)

which covers constant, power-law, tabulated and product densities as well as
their reflections t -> a + b - t. Every panel rule built here integrates such
a density times a piecewise polynomial exactly up to rounding.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property, lru_cache

import logging

import numpy as np

from orlicz_lab.core.errors import IncompatibleIntervals, InvalidMeasure, OutOfInterval
from orlicz_lab.numerics.quadrature import (
    GAUSS_ORDER,
    _jacobi,
    _legendre,
    adaptive_gauss,
    divergence_ladder,
    panel_rule,
)


logger = logging.getLogger(__name__)

GRADING_LEVELS = 8
_POINT_TOL = 1e-13


class DensityKind(str, Enum):
    CONSTANT = "constant"
    POWER_LAW = "power_law"
    TABULATED = "tabulated"
    PRODUCT = "product"
    REFLECTED = "reflected"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class LinearFactor:
    """Piecewise-linear nonnegative factor given on offset knots."""
    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.knots) < 2 or len(self.knots) != len(self.values):
            raise InvalidMeasure("a tabulated density needs at least two (t, w) knots")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise InvalidMeasure("tabulated density knots must be strictly increasing")
        if any(v < 0.0 or not np.isfinite(v) for v in self.values):
            raise InvalidMeasure("tabulated density values must be finite and >= 0")

    def __call__(self, u):
        return np.interp(u, self.knots, self.values)

    def reflected(self, length: float) -> "LinearFactor":
        return LinearFactor(
            tuple(length - k for k in reversed(self.knots)),
            tuple(reversed(self.values)),
        )

    def zeros(self) -> tuple[float, ...]:
        return tuple(k for k, v in zip(self.knots, self.values) if v == 0.0)


@dataclass(frozen=True)
class WeightedMeasure1D:
    """Measure on [a, b] with a nonnegative density."""
    a: float
    b: float
    kind: DensityKind
    scale: float = 1.0
    left_power: float = 0.0
    right_power: float = 0.0
    factors: tuple[LinearFactor, ...] = ()

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
            raise InvalidMeasure(f"interval [{self.a}, {self.b}] must satisfy a < b")
        if not (self.scale >= 0.0 and np.isfinite(self.scale)):
            raise InvalidMeasure("density scale must be finite and >= 0")
        if self.left_power <= -1.0 or self.right_power <= -1.0:
            raise InvalidMeasure("power-law exponents must exceed -1 for a finite total mass")

    # construction

    @classmethod
    def constant(cls, a: float, b: float, c: float = 1.0) -> "WeightedMeasure1D":
        return cls(float(a), float(b), DensityKind.CONSTANT, scale=float(c))

    @classmethod
    def lebesgue(cls, a: float = 0.0, b: float = 1.0) -> "WeightedMeasure1D":
        return cls.constant(a, b, 1.0)

    @classmethod
    def power_law(cls, a: float, b: float, alpha: float) -> "WeightedMeasure1D":
        return cls(float(a), float(b), DensityKind.POWER_LAW, left_power=float(alpha))

    @classmethod
    def tabulated(cls, a: float, b: float, knots) -> "WeightedMeasure1D":
        pairs = [tuple(map(float, pair)) for pair in knots]
        factor = LinearFactor(tuple(t - float(a) for t, _ in pairs), tuple(w for _, w in pairs))
        return cls(float(a), float(b), DensityKind.TABULATED, factors=(factor,))

    @classmethod
    def product(cls, first: "WeightedMeasure1D", second: "WeightedMeasure1D") -> "WeightedMeasure1D":
        if first.kind is DensityKind.PRODUCT or second.kind is DensityKind.PRODUCT:
            raise InvalidMeasure("a product density takes two non-product densities")
        require_same_interval(first, second)
        return cls(
            first.a,
            first.b,
            DensityKind.PRODUCT,
            scale=first.scale * second.scale,
            left_power=first.left_power + second.left_power,
            right_power=first.right_power + second.right_power,
            factors=first.factors + second.factors,
        )

    def reflected(self) -> "WeightedMeasure1D":
        """Image of the measure under t -> a + b - t."""
        return replace(
            self,
            kind=DensityKind.REFLECTED,
            left_power=self.right_power,
            right_power=self.left_power,
            factors=tuple(f.reflected(self.length) for f in self.factors),
        )

    def scaled(self, c: float) -> "WeightedMeasure1D":
        return replace(self, scale=self.scale * float(c))

    def shifted(self, delta: float) -> "WeightedMeasure1D":
        return replace(self, a=self.a + float(delta), b=self.b + float(delta))

    # geometry

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def has_closed_form(self) -> bool:
        return not self.factors and self.right_power == 0.0

    @property
    def total_mass_hint(self) -> float | None:
        if not self.has_closed_form:
            return None
        alpha = self.left_power
        return self.scale * self.length ** (alpha + 1.0) / (alpha + 1.0)

    @cached_property
    def breakpoints(self) -> tuple[float, ...]:
        """Panel boundaries in offset coordinates, graded toward algebraic endpoints."""
        length = self.length
        points = {0.0, length}
        for factor in self.factors:
            points.update(k for k in factor.knots if 0.0 < k < length)
        if self.left_power != 0.0:
            points.update(length * 2.0 ** (-j) for j in range(1, GRADING_LEVELS + 1))
        if self.right_power != 0.0:
            points.update(length - length * 2.0 ** (-j) for j in range(1, GRADING_LEVELS + 1))
        return _dedupe(sorted(points), length)

    def density(self, t):
        """Density at absolute points t."""
        return self._density(np.asarray(t, dtype=float) - self.a)

    def _density(self, u, skip_left: bool = False, skip_right: bool = False):
        u = np.asarray(u, dtype=float)
        value = np.full(u.shape, self.scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.left_power != 0.0 and not skip_left:
                value = value * np.power(np.maximum(u, 0.0), self.left_power)
            if self.right_power != 0.0 and not skip_right:
                value = value * np.power(np.maximum(self.length - u, 0.0), self.right_power)
        for factor in self.factors:
            value = value * factor(u)
        return value

    def _panel(self, lo: float, hi: float, order: int = GAUSS_ORDER) -> tuple[np.ndarray, np.ndarray]:
        left = self.left_power if lo == 0.0 else 0.0
        right = self.right_power if hi == self.length else 0.0
        nodes, weights = panel_rule(lo, hi, order, left, right)
        return nodes, weights * self._density(nodes, skip_left=left != 0.0, skip_right=right != 0.0)

    def rule(self, extra=(), order: int = GAUSS_ORDER) -> tuple[np.ndarray, np.ndarray]:
        """Absolute nodes and weights with sum(w * g(x)) ~ integral of g dmu.

        `extra` are absolute points where the integrand has kinks; they become
        panel boundaries.
        """
        offsets = tuple(sorted({round(float(x) - self.a, 15) for x in extra}))
        nodes, weights = _build_rule(self, offsets, order)
        return self.a + nodes, weights

    @property
    def edges(self) -> np.ndarray:
        """Panel boundaries in absolute coordinates, starting at a and ending at b."""
        edges = self.a + np.asarray(self.breakpoints)
        edges[0], edges[-1] = self.a, self.b
        return edges

    def panel(self, lo: float, hi: float, order: int = GAUSS_ORDER) -> tuple[np.ndarray, np.ndarray]:
        """Absolute nodes and density-weighted weights on [lo, hi] within [a, b].

        The algebraic end factors are absorbed into a Jacobi rule when lo is
        exactly a or hi is exactly b.
        """
        u_lo = 0.0 if lo == self.a else lo - self.a
        u_hi = self.length if hi == self.b else hi - self.a
        nodes, weights = self._panel(u_lo, u_hi, order)
        return self.a + nodes, weights

    # masses

    @cached_property
    def _mass_table(self) -> tuple[np.ndarray, np.ndarray]:
        bps = np.asarray(self.breakpoints)
        masses = np.array([float(np.sum(self._panel(lo, hi)[1])) for lo, hi in zip(bps[:-1], bps[1:])])
        return bps, np.concatenate([[0.0], np.cumsum(masses)])

    @cached_property
    def total_mass(self) -> float:
        hint = self.total_mass_hint
        return hint if hint is not None else float(self._mass_table[1][-1])

    def cumulative(self, x: float) -> float:
        """mu[a, x]."""
        return float(self._cumulative_u(np.asarray([self._offset(x)]))[0])

    def cumulative_right(self, x: float) -> float:
        """mu[x, b] = total - mu[a, x]."""
        return self.total_mass - self.cumulative(x)

    def _offset(self, x: float) -> float:
        x = float(x)
        slack = _POINT_TOL * max(1.0, abs(self.a), abs(self.b))
        if x < self.a - slack or x > self.b + slack:
            raise OutOfInterval(f"x = {x} lies outside [{self.a}, {self.b}]")
        return min(max(x - self.a, 0.0), self.length)

    def _cumulative_u(self, u: np.ndarray) -> np.ndarray:
        """Vectorized mu[0, u] in offset coordinates."""
        u = np.clip(np.asarray(u, dtype=float), 0.0, self.length)
        if self.has_closed_form:
            alpha = self.left_power
            return self.scale * np.power(u, alpha + 1.0) / (alpha + 1.0)

        bps, table = self._mass_table
        length = self.length
        panel = np.clip(np.searchsorted(bps, u, side="right") - 1, 0, len(bps) - 2)
        lo, hi = bps[panel], bps[panel + 1]
        result = table[panel].astype(float)

        x, w = _legendre(GAUSS_ORDER)
        first = (lo == 0.0) & (self.left_power != 0.0)
        last = (hi == length) & (self.right_power != 0.0) & ~first
        plain = ~first & ~last

        if np.any(plain):
            a, b = lo[plain], u[plain]
            half = 0.5 * (b - a)
            nodes = a[:, None] + half[:, None] * (x + 1.0)
            result[plain] += np.sum(half[:, None] * w * self._density(nodes), axis=1)
        if np.any(first):
            xj, wj = _jacobi(GAUSS_ORDER, self.left_power, 0.0)
            b = u[first]
            half = 0.5 * b
            nodes = half[:, None] * (xj + 1.0)
            weights = np.power(half, 1.0 + self.left_power)[:, None] * wj
            result[first] += np.sum(weights * self._density(nodes, skip_left=True), axis=1)
        if np.any(last):
            xj, wj = _jacobi(GAUSS_ORDER, 0.0, self.right_power)
            a = u[last]
            half = 0.5 * (length - a)
            nodes = a[:, None] + half[:, None] * (xj + 1.0)
            weights = np.power(half, 1.0 + self.right_power)[:, None] * wj
            remainder = np.sum(weights * self._density(nodes, skip_right=True), axis=1)
            full = table[panel[last] + 1] - table[panel[last]]
            result[last] += full - remainder
        return result

    def integrate(self, g, extra=()) -> float:
        nodes, weights = self.rule(extra)
        return float(np.dot(weights, g(nodes)))


def require_same_interval(*measures: WeightedMeasure1D) -> None:
    first = measures[0]
    for other in measures[1:]:
        scale = max(1.0, abs(first.a), abs(first.b))
        if abs(other.a - first.a) > _POINT_TOL * scale or abs(other.b - first.b) > _POINT_TOL * scale:
            raise IncompatibleIntervals(
                f"[{first.a}, {first.b}] and [{other.a}, {other.b}] must coincide"
            )


def _dedupe(points: list[float], length: float) -> tuple[float, ...]:
    kept = [points[0]]
    for point in points[1:]:
        if point - kept[-1] > _POINT_TOL * length:
            kept.append(point)
    kept[-1] = length
    return tuple(kept)


@lru_cache(maxsize=512)
def _build_rule(measure: WeightedMeasure1D, offsets: tuple[float, ...], order: int):
    length = measure.length
    points = set(measure.breakpoints)
    points.update(u for u in offsets if 0.0 < u < length)
    bps = _dedupe(sorted(points), length)
    nodes, weights = zip(*(measure._panel(lo, hi, order) for lo, hi in zip(bps[:-1], bps[1:])))
    return np.concatenate(nodes), np.concatenate(weights)


class MomentProfile:
    """Running integral of nu[0, u]^{p'} w(u)^{1 - p'} along [0, L].

    Built once per (nu, w, p'). Zeros of w are singular points handled by
    the divergence ladder; the first divergent point makes every later
    value +inf.
    """

    def __init__(self, nu: WeightedMeasure1D, w: WeightedMeasure1D, p_conj: float):
        require_same_interval(nu, w)
        self.nu = nu
        self.w = w
        self.p_conj = p_conj
        length = w.length

        singular = set()
        if w.scale == 0.0 or w.left_power > 0.0 or any(f(0.0) == 0.0 for f in w.factors):
            singular.add(0.0)
        if w.scale == 0.0 or w.right_power > 0.0 or any(f(length) == 0.0 for f in w.factors):
            singular.add(length)
        for factor in w.factors:
            singular.update(z for z in factor.zeros() if 0.0 < z < length)

        points = set(nu.breakpoints) | set(w.breakpoints) | singular
        self.bps = np.asarray(_dedupe(sorted(points), length))
        self.singular = {float(p) for p in self.bps if any(abs(p - s) <= _POINT_TOL * length for s in singular)}

        self.blowup: tuple[float, bool] | None = None
        self.halves: list[float] = []
        values = [0.0]
        for lo, hi in zip(self.bps[:-1], self.bps[1:]):
            piece, half, diverged_at = self._panel_integral(float(lo), float(hi))
            self.halves.append(half)
            if diverged_at is not None:
                self.blowup = diverged_at
                logger.debug(f"moment integrand diverges at offset {diverged_at[0]:.6g}")
                break
            values.append(values[-1] + piece)
        self.table = np.asarray(values)
        self._memo: dict[float, float] = {}

    def integrand(self, u):
        u = np.asarray(u, dtype=float)
        mass = self.nu._cumulative_u(u)
        density = self.w._density(u)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = np.power(mass, self.p_conj) * np.power(density, 1.0 - self.p_conj)
        return np.where(mass > 0.0, value, 0.0)

    def _panel_integral(self, lo: float, hi: float):
        left, right = lo in self.singular, hi in self.singular
        if left and right:
            mid = 0.5 * (lo + hi)
            first, div_first = divergence_ladder(self.integrand, lo, mid)
            if div_first:
                return np.inf, 0.0, (lo, False)
            second, div_second = divergence_ladder(self.integrand, hi, mid)
            if div_second:
                return np.inf, first, (hi, True)
            return first + second, first, None
        if left:
            value, diverged = divergence_ladder(self.integrand, lo, hi)
            return value, value, ((lo, False) if diverged else None)
        if right:
            value, diverged = divergence_ladder(self.integrand, hi, lo)
            return value, value, ((hi, True) if diverged else None)
        value = adaptive_gauss(self.integrand, lo, hi)
        if not np.isfinite(value):
            return np.inf, 0.0, (lo, False)
        return value, value, None

    def integral_to(self, u: float) -> float:
        u = float(u)
        if u not in self._memo:
            self._memo[u] = self._integral_to(u)
        return self._memo[u]

    def _integral_to(self, u: float) -> float:
        if self.blowup is not None:
            point, inclusive = self.blowup
            if u > point or (u == point and inclusive):
                return float("inf")
        u = min(max(float(u), 0.0), float(self.bps[-1]))
        k = int(np.clip(np.searchsorted(self.bps, u, side="right") - 1, 0, len(self.bps) - 2))
        lo, hi = float(self.bps[k]), float(self.bps[k + 1])
        base = float(self.table[k])
        if u == lo:
            return base
        if u == hi and k + 1 < len(self.table):
            return float(self.table[k + 1])

        left, right = lo in self.singular, hi in self.singular
        if left and right:
            mid = 0.5 * (lo + hi)
            if u <= mid:
                return base + self.halves[k] - adaptive_gauss(self.integrand, u, mid)
            return base + self.halves[k] + adaptive_gauss(self.integrand, mid, u)
        if left:
            return base + self.halves[k] - adaptive_gauss(self.integrand, u, hi)
        return base + adaptive_gauss(self.integrand, lo, u)


@lru_cache(maxsize=256)
def moment_profile(nu: WeightedMeasure1D, w: WeightedMeasure1D, p_conj: float) -> MomentProfile:
    return MomentProfile(nu, w, p_conj)


def tail_moment(nu: WeightedMeasure1D, w: WeightedMeasure1D, p: float, side: Side, x: float) -> float:
    """Left: int_a^x nu[a,t]^{p'} w(t)^{1-p'} dt.  Right: int_x^b nu[t,b]^{p'} w(t)^{1-p'} dt.

    +inf when the divergence ladder declares the integral infinite.
    """
    require_same_interval(nu, w)
    if not p > 1.0:
        raise ValueError("tail_moment needs p > 1")
    p_conj = p / (p - 1.0)
    u = w._offset(x)
    if Side(side) is Side.LEFT:
        return moment_profile(nu, w, p_conj).integral_to(u)
    return moment_profile(nu.reflected(), w.reflected(), p_conj).integral_to(w.length - u)


@dataclass(frozen=True)
class ProductMeasure:
    """mu = first x second on I x J."""
    first: WeightedMeasure1D
    second: WeightedMeasure1D

    @property
    def total_mass(self) -> float:
        return self.first.total_mass * self.second.total_mass

    def shifted(self, delta_first: float, delta_second: float) -> "ProductMeasure":
        return ProductMeasure(self.first.shifted(delta_first), self.second.shifted(delta_second))
