"""Young functions, their inverses on [0, inf) and the structural checks the theorems need."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import logging
import math

import numpy as np
from scipy.optimize import bisect

from orlicz_lab.core.errors import InvalidYoungFunction, NotInvertible, OverflowDomain


logger = logging.getLogger(__name__)

EPS_INV = 1e-10
EPS_CONVEX = 1e-9
_HALF_OVERFLOW = 0.5 * np.finfo(float).max
_LOG_HALF_OVERFLOW = math.log(_HALF_OVERFLOW)


class YoungKind(str, Enum):
    """Families of Young functions the lab knows how to evaluate."""
    POWER = "power"
    EXP_POWER = "exp_power"
    TABULATED = "tabulated"


class YoungFunction(ABC):
    """Even convex Phi with Phi(0) = 0 and Phi(t) -> inf.

    Subclasses implement `_phi` on |t| (vectorized) and `domain_cap`.
    Invertibility on [0, domain_cap] is certified lazily, once, by strict
    increase on a geometric grid.
    """

    kind: YoungKind

    @property
    @abstractmethod
    def domain_cap(self) -> float:
        ...

    @abstractmethod
    def _phi(self, t: np.ndarray) -> np.ndarray:
        ...

    def kinks(self) -> tuple[float, ...]:
        """Abscissae in (0, inf) where Phi is not smooth."""
        return ()

    @property
    def is_pure_power(self) -> bool:
        return False

    @property
    def smooth_at_zero(self) -> bool:
        """Whether Phi(|t|) is a polynomial or analytic function of |t| next to 0."""
        return True

    def eval(self, t: float) -> float:
        magnitude = abs(float(t))
        if magnitude > self.domain_cap:
            raise OverflowDomain(f"|t| = {magnitude:g} exceeds domain_cap = {self.domain_cap:g}")
        return float(self._phi(np.asarray(magnitude)))

    def __call__(self, t):
        """Vectorized Phi(|t|); raises OverflowDomain when any |t| exceeds domain_cap."""
        magnitude = np.abs(np.asarray(t, dtype=float))
        if magnitude.size and float(np.max(magnitude)) > self.domain_cap:
            raise OverflowDomain(f"argument exceeds domain_cap = {self.domain_cap:g}")
        return self._phi(magnitude)

    def evaluate_unbounded(self, t: np.ndarray) -> np.ndarray:
        """Vectorized Phi(|t|) that maps arguments beyond domain_cap to +inf."""
        magnitude = np.abs(np.asarray(t, dtype=float))
        over = magnitude > self.domain_cap
        values = self._phi(np.where(over, 0.0, magnitude))
        return np.where(over, np.inf, values)

    @cached_property
    def invertible(self) -> bool:
        grid = np.geomspace(1e-8, self.domain_cap, 512)
        values = self._phi(grid)
        return bool(values[0] > 0.0 and np.all(np.diff(values) > 0.0))

    @cached_property
    def _phi_cap(self) -> float:
        return float(self._phi(np.asarray(self.domain_cap)))

    def inverse(self, y: float) -> float:
        """Phi^{-1}(y) on [0, inf) by an expanding bracket followed by bisection."""
        y = float(y)
        if y < 0.0:
            raise ValueError("inverse is defined for y >= 0")
        if not self.invertible:
            raise NotInvertible(f"{self!r} is not strictly increasing on [0, domain_cap]")
        if y == 0.0:
            return 0.0
        if y > self._phi_cap:
            raise OverflowDomain(f"y = {y:g} exceeds Phi(domain_cap) = {self._phi_cap:g}")

        def phi(t: float) -> float:
            return float(self._phi(np.asarray(t)))

        cap = self.domain_cap
        hi = min(1.0, cap)
        while phi(hi) < y:
            hi = min(2.0 * hi, cap)
        lo = 0.5 * hi
        while lo > 0.0 and phi(lo) > y:
            hi, lo = lo, 0.5 * lo

        root = bisect(
            lambda t: phi(t) - y,
            lo,
            hi,
            xtol=np.finfo(float).tiny,
            rtol=4.0 * np.finfo(float).eps,
            maxiter=400,
        )
        return float(root)

    def c0(self) -> float:
        """C_0(Phi) = 2 / Phi^{-1}(1/2)."""
        return 2.0 / self.inverse(0.5)

    def unit_norm(self, mass: float) -> float:
        """Gauge norm of the constant 1 on a measure space of the given total mass."""
        if mass <= 0.0:
            return 0.0
        return 1.0 / self.inverse(1.0 / mass)

    def check_shape(self, grid: np.ndarray | None = None) -> None:
        """Raise InvalidYoungFunction unless Phi(0)=0, Phi is nondecreasing, midpoint convex and Phi(cap) > 1."""
        if grid is None:
            grid = np.linspace(0.0, min(self.domain_cap, 64.0), 257)
        values = self._phi(grid)
        if float(self._phi(np.asarray(0.0))) != 0.0:
            raise InvalidYoungFunction("Phi(0) must be 0")
        if np.any(np.diff(values) < 0.0):
            raise InvalidYoungFunction("Phi must be nondecreasing on [0, domain_cap]")
        mids = self._phi(0.5 * (grid[:-2] + grid[2:]))
        chords = 0.5 * (values[:-2] + values[2:])
        if np.any(mids > chords * (1.0 + EPS_CONVEX) + 1e-300):
            raise InvalidYoungFunction("Phi must be convex")
        if not self._phi_cap > 1.0:
            raise InvalidYoungFunction("Phi(domain_cap) must exceed 1")


@dataclass(frozen=True)
class PowerYoung(YoungFunction):
    """Phi(t) = |t|^q."""
    q: float
    kind = YoungKind.POWER

    def __post_init__(self):
        if not self.q >= 1.0:
            raise InvalidYoungFunction(f"power exponent must be >= 1, got {self.q}")

    @property
    def is_pure_power(self) -> bool:
        return True

    @property
    def smooth_at_zero(self) -> bool:
        return float(self.q).is_integer()

    @property
    def domain_cap(self) -> float:
        return math.exp(_LOG_HALF_OVERFLOW / self.q)

    def _phi(self, t: np.ndarray) -> np.ndarray:
        return np.power(t, self.q)


@dataclass(frozen=True)
class ExpPowerYoung(YoungFunction):
    """Phi(t) = exp(|t|^q) - 1."""
    q: float
    kind = YoungKind.EXP_POWER

    def __post_init__(self):
        if not self.q >= 1.0:
            raise InvalidYoungFunction(f"exponent must be >= 1, got {self.q}")

    @property
    def smooth_at_zero(self) -> bool:
        return float(self.q).is_integer()

    @property
    def domain_cap(self) -> float:
        return _LOG_HALF_OVERFLOW ** (1.0 / self.q)

    def _phi(self, t: np.ndarray) -> np.ndarray:
        return np.expm1(np.power(t, self.q))


@dataclass(frozen=True)
class TabulatedYoung(YoungFunction):
    """Even extension of the piecewise-linear interpolant through (t_i, phi_i).

    Beyond the last knot the last linear piece continues, which keeps Phi
    convex and unbounded.
    """
    abscissae: tuple[float, ...]
    ordinates: tuple[float, ...]
    kind = YoungKind.TABULATED
    _slopes: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.abscissae, dtype=float)
        phi = np.asarray(self.ordinates, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.size != phi.size:
            raise InvalidYoungFunction("tabulated Young function needs at least two (t, phi) knots")
        if t[0] != 0.0 or phi[0] != 0.0:
            raise InvalidYoungFunction("the first knot must be (0, 0)")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidYoungFunction("knot abscissae must be strictly increasing")
        if np.any(np.diff(phi) < 0.0):
            raise InvalidYoungFunction("knot ordinates must be nondecreasing")
        slopes = np.diff(phi) / np.diff(t)
        if np.any(np.diff(slopes) < -EPS_CONVEX * np.maximum(1.0, np.abs(slopes[1:]))):
            raise InvalidYoungFunction("tabulated Young function must be convex (nondecreasing slopes)")
        if slopes[-1] <= 0.0:
            raise InvalidYoungFunction("the last linear piece must increase so that Phi is unbounded")
        object.__setattr__(self, "_slopes", tuple(float(s) for s in slopes))

    @classmethod
    def from_knots(cls, knots) -> "TabulatedYoung":
        pairs = [tuple(map(float, pair)) for pair in knots]
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def kinks(self) -> tuple[float, ...]:
        return tuple(self.abscissae[1:-1])

    @property
    def domain_cap(self) -> float:
        last_t, last_phi = self.abscissae[-1], self.ordinates[-1]
        return last_t + (_HALF_OVERFLOW - last_phi) / self._slopes[-1]

    def _phi(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, self.abscissae, self.ordinates)
        beyond = self.ordinates[-1] + self._slopes[-1] * (t - self.abscissae[-1])
        return np.where(t > self.abscissae[-1], beyond, inside)


def check_submultiplicative(phi: YoungFunction, grid=None) -> tuple[bool, float]:
    """Whether Phi(st) <= Phi(s) Phi(t) (1 + eps) on all grid pairs, and the worst ratio.

    Pairs containing 0 are skipped (0/0).
    """
    if grid is None:
        grid = np.geomspace(1e-2, min(1e2, 0.999 * math.sqrt(phi.domain_cap)), 65)
    s = np.asarray(grid, dtype=float)
    s = s[s > 0.0]
    if s.size == 0:
        return True, 1.0
    products = np.outer(s, s)
    if float(products.max()) > phi.domain_cap:
        raise OverflowDomain("grid products exceed domain_cap")
    single = phi(s)
    numerator = phi(products)
    denominator = np.outer(single, single)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(denominator > 0.0, numerator / denominator, np.where(numerator > 0.0, np.inf, 1.0))
    worst = float(np.max(ratios))
    holds = bool(np.all(numerator <= denominator * (1.0 + EPS_CONVEX)))
    return holds, worst


def check_gamma_convex(phi: YoungFunction, p: float, grid=None) -> tuple[bool, float]:
    """Midpoint convexity of Gamma(t) = Phi(t^{1/p}) on all grid pairs.

    Returns the verdict and the worst excess Gamma(mid) - chord, relative to the chord.
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if grid is None:
        upper = 100.0 if p * math.log(phi.domain_cap) > math.log(100.0) else phi.domain_cap ** p
        grid = np.linspace(0.0, upper, 201)
    t = np.asarray(grid, dtype=float)
    if t.size and float(t.max()) ** (1.0 / p) > phi.domain_cap:
        raise OverflowDomain("grid exceeds domain_cap ** p")
    gamma = phi(np.power(t, 1.0 / p))
    mids = phi(np.power(0.5 * (t[:, None] + t[None, :]), 1.0 / p))
    chords = 0.5 * (gamma[:, None] + gamma[None, :])
    excess = mids - chords
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(chords > 0.0, excess / chords, np.where(excess > 0.0, np.inf, 0.0))
    worst = float(np.max(relative))
    holds = bool(np.all(excess <= EPS_CONVEX * chords + 1e-300))
    return holds, worst


def young_from_spec(kind: str, q: float | None = None, knots=None) -> YoungFunction:
    kind = YoungKind(kind)
    if kind is YoungKind.POWER:
        phi = PowerYoung(float(q))
    elif kind is YoungKind.EXP_POWER:
        phi = ExpPowerYoung(float(q))
    else:
        phi = TabulatedYoung.from_knots(knots)
    phi.check_shape()
    return phi
