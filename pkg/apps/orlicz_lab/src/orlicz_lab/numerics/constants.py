"""Poincare constants K_{1,Phi}, K_{p,Phi} and its tilde variant as suprema over interior points."""

from collections.abc import Callable
from enum import Enum

import logging
import math

import numpy as np
from pydantic import BaseModel, Field

from orlicz_lab.core.errors import OverflowDomain, ZeroMassError
from orlicz_lab.numerics.measure import Side, WeightedMeasure1D, require_same_interval, tail_moment
from orlicz_lab.numerics.norms import step_gauge_norm
from orlicz_lab.numerics.young import YoungFunction


logger = logging.getLogger(__name__)

EPS_SUP = 1e-5
INF_CAP = 1e12
MAX_LEVELS = 12
BASE_CELLS = 128
MAX_CELLS = 2048
GOLDEN_POINTS = 16
EDGE_LEVELS = 3
_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class KConstantKind(str, Enum):
    K1 = "k1"
    KP = "kp"
    KP_TILDE = "kp_tilde"


class KConstantReport(BaseModel):
    kind: KConstantKind = Field(..., description="Which constant was evaluated")
    p: float = Field(..., description="Exponent p of the constant (1 for K_1)")
    value: float = Field(..., description="Constant value; +inf when declared infinite")
    attaining_x: float | None = Field(None, description="Point attaining the largest supremum term")
    sup_terms: tuple[float, float] = Field(..., description="(left_sup, right_sup); right_sup is 0 for K_1")
    refinement_history: list[tuple[int, float]] = Field(
        default_factory=list, description="(evaluated points, running value) per refinement level"
    )
    converged: bool = Field(..., description="Whether successive estimates met the relative tolerance")
    infinite: bool = Field(False, description="Constant declared +inf")
    upper_bound: float = Field(..., description="Heuristic upper bound from the local modulus around the argmax")
    zero_density: bool = Field(False, description="An evaluated point had w(x) = 0")
    nu_mass: float = Field(..., description="nu(I)")


class SupSearch:
    """Refining grid search for sup of a continuous term over (a, b).

    Each level doubles the dyadic grid (capped at MAX_CELLS cells), halves the
    endpoint margin and adds golden-ratio points around the running argmax.
    All values are kept, so the estimate never decreases.
    """

    def __init__(self, term: Callable[[float], float], a: float, b: float):
        self.term = term
        self.a, self.b = a, b
        self.length = b - a
        self.values: dict[float, float] = {}
        self.level = 0
        self.history: list[tuple[int, float]] = []
        self.best_x: float | None = None
        self.best = -np.inf
        self.done = False
        self.converged = False
        self.infinite = False
        self._edge_run = 0
        self._last_increment: float | None = None

    def _margin(self) -> float:
        return self.length * 2.0 ** (-self.level - 4)

    def _evaluate(self, points) -> None:
        for x in points:
            x = float(x)
            if x not in self.values:
                value = self.term(x)
                self.values[x] = np.inf if np.isnan(value) else value

    def _argmax(self) -> tuple[float, float]:
        # ties go to the smaller x
        xs = sorted(self.values)
        values = np.array([self.values[x] for x in xs])
        idx = int(np.argmax(values))
        return xs[idx], float(values[idx])

    def advance(self) -> bool:
        if self.done:
            return True
        cells = min(BASE_CELLS * 2**self.level, MAX_CELLS)
        margin = self._margin()
        lo, hi = self.a + margin, self.b - margin
        grid = self.a + self.length * (np.arange(1, cells) / cells)
        grid = grid[(grid >= lo) & (grid <= hi)]
        self._evaluate(np.concatenate([grid, [lo, hi]]))

        x_best, _ = self._argmax()
        offsets = (self.length / cells) * _GOLDEN ** (-np.arange(GOLDEN_POINTS, dtype=float))
        self._evaluate(np.clip(np.concatenate([x_best - offsets, x_best + offsets]), lo, hi))

        previous = self.best
        self.best_x, self.best = self._argmax()
        self.history.append((len(self.values), self.best))
        logger.debug(f"sup level {self.level}: {self.best:.12g} at x = {self.best_x:.12g}")

        if not np.isfinite(self.best) or self.best > INF_CAP:
            self.infinite = self.done = True
            return True

        at_edge = min(self.best_x - self.a, self.b - self.best_x) <= margin * (1.0 + 1e-9)
        if self.level > 0 and np.isfinite(previous):
            increment = self.best - previous
            growing = increment > 0.0 and (
                self._last_increment is None or increment >= 0.99 * self._last_increment
            )
            self._edge_run = self._edge_run + 1 if at_edge and growing else 0
            self._last_increment = increment
            if self._edge_run >= EDGE_LEVELS:
                logger.info(f"supremum keeps growing toward the endpoint near x = {self.best_x:.6g}; declared +inf")
                self.infinite = self.done = True
                return True
            if abs(increment) <= EPS_SUP * max(abs(self.best), np.finfo(float).tiny):
                self.converged = self.done = True
                return True

        self.level += 1
        if self.level >= MAX_LEVELS:
            self.done = True
        return self.done

    def upper_bound(self) -> float:
        """best + local slope * half gap to the neighbours of the argmax."""
        if self.infinite or self.best_x is None:
            return np.inf
        xs = sorted(self.values)
        idx = xs.index(self.best_x)
        slack = 0.0
        for neighbour in (idx - 1, idx + 1):
            if 0 <= neighbour < len(xs):
                gap = abs(xs[neighbour] - self.best_x)
                slope = abs(self.values[xs[neighbour]] - self.best) / gap
                slack = max(slack, slope * gap / 2.0)
        return self.best + slack


def _run(searches: list[SupSearch], combine: Callable[[list[float]], float]) -> list[tuple[int, float]]:
    history = []
    while not all(search.done for search in searches):
        for search in searches:
            search.advance()
        history.append((sum(len(s.values) for s in searches), combine([s.best for s in searches])))
    return history


def _nu_mass(nu: WeightedMeasure1D) -> float:
    mass = nu.total_mass
    if mass == 0.0:
        raise ZeroMassError("the constants are normalised by nu(I), which is 0")
    return mass


def _inverse_bracket(phi: YoungFunction, mass: float, root: int) -> float:
    """[Phi^{-1}(mass^{-1/root})]^{-root}; 0 when the argument is out of range."""
    if mass <= 0.0:
        return 0.0
    try:
        return phi.inverse(mass ** (-1.0 / root)) ** (-root)
    except OverflowDomain:
        return 0.0


def _product(bracket: float, moment: float, p_conj: float) -> float:
    if not np.isfinite(moment):
        return np.inf
    return bracket * moment ** (1.0 / p_conj)


def k1_phi(phi: YoungFunction, mu: WeightedMeasure1D, nu: WeightedMeasure1D, w: WeightedMeasure1D) -> KConstantReport:
    """K_{1,Phi}: sup_x ||nu[a,x] chi_[x,b] - nu[x,b] chi_[a,x]||_{L^Phi(mu)} / w(x), over nu(I)."""
    require_same_interval(mu, nu, w)
    nu_mass = _nu_mass(nu)
    flags = {"zero_density": False}

    def term(x: float) -> float:
        density = float(w.density(x))
        if density == 0.0:
            if not flags["zero_density"]:
                logger.warning(f"w vanishes at x = {x:.6g}; K_1 term treated as +inf")
            flags["zero_density"] = True
            return np.inf
        left_mass = nu.cumulative(x)
        return step_gauge_norm(phi, mu, x, left_mass, nu_mass - left_mass) / density

    search = SupSearch(term, mu.a, mu.b)
    history = _run([search], lambda bests: bests[0] / nu_mass)
    return _report(KConstantKind.K1, 1.0, nu_mass, [search], history, flags["zero_density"])


def _kp(phi, mu, nu, w, p: float, kind: KConstantKind) -> KConstantReport:
    require_same_interval(mu, nu, w)
    if not p > 1.0:
        raise ValueError("K_{p,Phi} needs p > 1; use k1_phi for p = 1")
    nu_mass = _nu_mass(nu)
    p_conj = p / (p - 1.0)
    root = 2 if kind is KConstantKind.KP else 1
    total = mu.total_mass

    def left(x: float) -> float:
        bracket = _inverse_bracket(phi, total - mu.cumulative(x), root)
        return _product(bracket, tail_moment(nu, w, p, Side.LEFT, x), p_conj)

    def right(x: float) -> float:
        bracket = _inverse_bracket(phi, mu.cumulative(x), root)
        return _product(bracket, tail_moment(nu, w, p, Side.RIGHT, x), p_conj)

    searches = [SupSearch(left, mu.a, mu.b), SupSearch(right, mu.a, mu.b)]
    history = _run(searches, lambda bests: sum(bests) / nu_mass)
    return _report(kind, p, nu_mass, searches, history, False)


def kp_phi(phi, mu, nu, w, p: float) -> KConstantReport:
    """K_{p,Phi} with the bracket [Phi^{-1}(1/mu^{1/2})]^{-2}."""
    return _kp(phi, mu, nu, w, p, KConstantKind.KP)


def kp_phi_tilde(phi, mu, nu, w, p: float) -> KConstantReport:
    """K~_{p,Phi} with the bracket [Phi^{-1}(1/mu)]^{-1}."""
    return _kp(phi, mu, nu, w, p, KConstantKind.KP_TILDE)


def _report(kind, p, nu_mass, searches: list[SupSearch], history, zero_density: bool) -> KConstantReport:
    infinite = any(search.infinite for search in searches)
    converged = all(search.converged for search in searches)
    sups = [np.inf if s.infinite else s.best for s in searches]
    value = np.inf if infinite else sum(sups) / nu_mass
    upper = np.inf if infinite else sum(s.upper_bound() for s in searches) / nu_mass
    if not converged and not infinite:
        logger.warning(f"{kind.value} sup search stopped after {MAX_LEVELS} levels without converging")

    leading = max(searches, key=lambda s: s.best)
    return KConstantReport(
        kind=kind,
        p=p,
        value=value,
        attaining_x=leading.best_x,
        sup_terms=(sups[0], sups[1] if len(sups) > 1 else 0.0),
        refinement_history=history,
        converged=converged,
        infinite=infinite,
        upper_bound=upper,
        zero_density=zero_density,
        nu_mass=nu_mass,
    )


def poincare_constant(phi: YoungFunction, mu, nu, w, p: float) -> tuple[float, KConstantReport]:
    """C = K_{1,Phi} for p = 1 and C_0(Phi) K_{p,Phi} for p > 1, with the underlying report."""
    if p == 1.0:
        report = k1_phi(phi, mu, nu, w)
        return report.value, report
    report = kp_phi(phi, mu, nu, w, p)
    return phi.c0() * report.value, report
