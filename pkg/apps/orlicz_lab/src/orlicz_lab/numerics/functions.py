"""Piecewise-linear and piecewise-bilinear test functions with exact derivatives.

Coefficients are stored per cell in local offsets (s = x1 - left knot,
t = x2 - lower knot), so translating the grid leaves them untouched and
partial derivatives are again piecewise bilinear.
"""

from dataclasses import dataclass
from collections.abc import Callable

import numpy as np

from orlicz_lab.core.errors import IncompatibleIntervals


_SNAP = 1e-12


def _as_knots(knots) -> np.ndarray:
    knots = np.asarray(knots, dtype=float)
    if knots.ndim != 1 or knots.size < 2:
        raise ValueError("a grid needs at least two knots")
    if np.any(np.diff(knots) <= 0.0) or not np.all(np.isfinite(knots)):
        raise ValueError("grid knots must be finite and strictly increasing")
    return knots


def _cells(knots: np.ndarray, x) -> np.ndarray:
    return np.clip(np.searchsorted(knots, x, side="right") - 1, 0, knots.size - 2)


def _edge_crossings(lo: np.ndarray, width: np.ndarray, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    lo, width = np.broadcast_to(lo, start.shape), np.broadcast_to(width, start.shape)
    flips = start * end < 0.0
    return lo[flips] + width[flips] * start[flips] / (start[flips] - end[flips])


def refine_knots(knots, factor: int = 2) -> np.ndarray:
    """Insert factor - 1 equispaced points in every cell."""
    knots = np.asarray(knots, dtype=float)
    fractions = np.arange(factor) / factor
    inner = knots[:-1, None] + np.diff(knots)[:, None] * fractions
    return np.concatenate([inner.ravel(), knots[-1:]])


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Cellwise linear function; jumps at knots are allowed."""
    __test__ = False

    knots: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        cell = _cells(self.knots, x)
        width = self.knots[cell + 1] - self.knots[cell]
        s = (x - self.knots[cell]) / width
        return self.left[cell] + (self.right[cell] - self.left[cell]) * s

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def is_zero(self) -> bool:
        return not (np.any(self.left) or np.any(self.right))

    def sup_abs(self) -> float:
        return float(max(np.max(np.abs(self.left)), np.max(np.abs(self.right))))

    def zero_crossings(self) -> np.ndarray:
        """Interior points where a cell changes sign."""
        flips = self.left * self.right < 0.0
        lo = self.knots[:-1][flips]
        width = np.diff(self.knots)[flips]
        share = self.left[flips] / (self.left[flips] - self.right[flips])
        return lo + width * share

    def level_crossings(self, level: float) -> np.ndarray:
        """Points where |f| crosses `level` inside a cell."""
        points = []
        for target in (level, -level):
            a, b = self.left - target, self.right - target
            flips = a * b < 0.0
            points.append(self.knots[:-1][flips] + np.diff(self.knots)[flips] * a[flips] / (a[flips] - b[flips]))
        return np.concatenate(points)

    def pieces(self, edges) -> tuple[np.ndarray, np.ndarray]:
        """Values at both ends of every cell of a grid that refines the knots."""
        edges = np.asarray(edges, dtype=float)
        lo, hi = edges[:-1], edges[1:]
        cell = _cells(self.knots, 0.5 * (lo + hi))
        slope = (self.right - self.left)[cell] / np.diff(self.knots)[cell]
        start = self.left[cell]
        return start + slope * (lo - self.knots[cell]), start + slope * (hi - self.knots[cell])

    def breakpoints(self) -> np.ndarray:
        return np.union1d(self.knots, self.zero_crossings())

    def derivative(self) -> "PiecewiseLinear":
        slopes = (self.right - self.left) / np.diff(self.knots)
        return PiecewiseLinear(self.knots, slopes, slopes.copy())

    def shifted(self, delta: float) -> "PiecewiseLinear":
        return PiecewiseLinear(self.knots + delta, self.left, self.right)

    def scaled(self, c: float) -> "PiecewiseLinear":
        return PiecewiseLinear(self.knots, c * self.left, c * self.right)

    def __sub__(self, other: float) -> "PiecewiseLinear":
        return PiecewiseLinear(self.knots, self.left - other, self.right - other)

    def require_interval(self, a: float, b: float) -> None:
        scale = max(1.0, abs(a), abs(b))
        if abs(self.knots[0] - a) > _SNAP * scale or abs(self.knots[-1] - b) > _SNAP * scale:
            raise IncompatibleIntervals(
                f"function lives on [{self.knots[0]}, {self.knots[-1]}], measure on [{a}, {b}]"
            )


class TestFunction1D(PiecewiseLinear):
    """Continuous piecewise-linear interpolant through (knot, value) pairs."""
    __test__ = False

    def __init__(self, knots, values):
        knots = _as_knots(knots)
        values = np.asarray(values, dtype=float)
        if values.shape != knots.shape or not np.all(np.isfinite(values)):
            raise ValueError("one finite value per knot is required")
        super().__init__(knots, values[:-1].copy(), values[1:].copy())

    @classmethod
    def from_callable(cls, g: Callable, knots) -> "TestFunction1D":
        knots = _as_knots(knots)
        return cls(knots, np.asarray(g(knots), dtype=float) * np.ones_like(knots))

    @classmethod
    def constant(cls, a: float, b: float, c: float) -> "TestFunction1D":
        return cls([a, b], [c, c])

    @property
    def values(self) -> np.ndarray:
        return np.concatenate([self.left, self.right[-1:]])


@dataclass(frozen=True, eq=False)
class PiecewiseBilinear:
    """c0 + c1*s + c2*t + c3*s*t on every cell of a tensor grid."""
    __test__ = False

    x1_knots: np.ndarray
    x2_knots: np.ndarray
    coefficients: np.ndarray  # shape (n1, n2, 4)

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        i, j = _cells(self.x1_knots, x1), _cells(self.x2_knots, x2)
        s = x1 - self.x1_knots[i]
        t = x2 - self.x2_knots[j]
        c = self.coefficients[i, j]
        return c[..., 0] + c[..., 1] * s + c[..., 2] * t + c[..., 3] * s * t

    @property
    def intervals(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (
            (float(self.x1_knots[0]), float(self.x1_knots[-1])),
            (float(self.x2_knots[0]), float(self.x2_knots[-1])),
        )

    def _corners(self) -> np.ndarray:
        h1 = np.diff(self.x1_knots)[:, None]
        h2 = np.diff(self.x2_knots)[None, :]
        c0, c1, c2, c3 = np.moveaxis(self.coefficients, -1, 0)
        return np.stack([c0, c0 + c1 * h1, c0 + c2 * h2, c0 + c1 * h1 + c2 * h2 + c3 * h1 * h2])

    def is_zero(self) -> bool:
        return not np.any(self._corners())

    def sup_abs(self) -> float:
        return float(np.max(np.abs(self._corners())))

    def slice_x1(self, x2: float) -> PiecewiseLinear:
        """x1 -> F(x1, x2) for fixed x2."""
        j = int(_cells(self.x2_knots, x2))
        t = float(x2) - self.x2_knots[j]
        c0, c1, c2, c3 = np.moveaxis(self.coefficients[:, j], -1, 0)
        h1 = np.diff(self.x1_knots)
        return PiecewiseLinear(self.x1_knots, c0 + c2 * t, c0 + c2 * t + (c1 + c3 * t) * h1)

    def slice_x2(self, x1: float) -> PiecewiseLinear:
        """x2 -> F(x1, x2) for fixed x1."""
        i = int(_cells(self.x1_knots, x1))
        s = float(x1) - self.x1_knots[i]
        c0, c1, c2, c3 = np.moveaxis(self.coefficients[i], -1, 0)
        h2 = np.diff(self.x2_knots)
        return PiecewiseLinear(self.x2_knots, c0 + c1 * s, c0 + c1 * s + (c2 + c3 * s) * h2)

    def partial_x1(self) -> "PiecewiseBilinear":
        c = self.coefficients
        zeros = np.zeros_like(c[..., 0])
        return PiecewiseBilinear(self.x1_knots, self.x2_knots, np.stack([c[..., 1], zeros, c[..., 3], zeros], axis=-1))

    def partial_x2(self) -> "PiecewiseBilinear":
        c = self.coefficients
        zeros = np.zeros_like(c[..., 0])
        return PiecewiseBilinear(self.x1_knots, self.x2_knots, np.stack([c[..., 2], c[..., 3], zeros, zeros], axis=-1))

    def pieces_along_x1(self, edges, x2) -> tuple[np.ndarray, np.ndarray]:
        """Row values at both ends of every x1 cell of `edges`, one row per x2.

        `edges` must refine the x1 knots; F is linear in x1 on every cell.
        Returns two arrays of shape (len(x2), len(edges) - 1).
        """
        edges = np.asarray(edges, dtype=float)
        x2 = np.atleast_1d(np.asarray(x2, dtype=float))
        lo, hi = edges[:-1], edges[1:]
        i = _cells(self.x1_knots, 0.5 * (lo + hi))
        j = _cells(self.x2_knots, x2)
        c = self.coefficients[i[None, :], j[:, None]]
        t = (x2 - self.x2_knots[j])[:, None]
        s_lo, s_hi = lo - self.x1_knots[i], hi - self.x1_knots[i]
        base, slope = c[..., 0] + c[..., 2] * t, c[..., 1] + c[..., 3] * t
        return base + slope * s_lo, base + slope * s_hi

    def boundary_lines(self, edges) -> list[PiecewiseLinear]:
        """x2 -> F(x, x2) at both ends of every x1 cell of `edges`, taken from inside the cell."""
        edges = np.asarray(edges, dtype=float)
        h2 = np.diff(self.x2_knots)
        lines = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            i = int(_cells(self.x1_knots, 0.5 * (lo + hi)))
            c0, c1, c2, c3 = np.moveaxis(self.coefficients[i], -1, 0)
            for s in (lo - self.x1_knots[i], hi - self.x1_knots[i]):
                start = c0 + c1 * s
                lines.append(PiecewiseLinear(self.x2_knots, start, start + (c2 + c3 * s) * h2))
        return lines

    def transposed(self) -> "PiecewiseBilinear":
        """(x2, x1) -> F(x1, x2)."""
        c = np.swapaxes(self.coefficients, 0, 1)[..., [0, 2, 1, 3]]
        return PiecewiseBilinear(self.x2_knots, self.x1_knots, c)

    def x1_breakpoints(self) -> np.ndarray:
        """x1 knots plus sign changes of F along the lower and upper edge of every cell."""
        corners = self._corners()
        lo = self.x1_knots[:-1, None]
        h1 = np.diff(self.x1_knots)[:, None]
        points = [self.x1_knots]
        for left, right in ((corners[0], corners[1]), (corners[2], corners[3])):
            points.append(_edge_crossings(lo, h1, left, right))
        return np.unique(np.concatenate(points))

    def x2_breakpoints(self) -> np.ndarray:
        """x2 knots plus sign changes of F along the left and right edge of every cell."""
        corners = self._corners()
        lo = self.x2_knots[None, :-1]
        h2 = np.diff(self.x2_knots)[None, :]
        points = [self.x2_knots]
        for lower, upper in ((corners[0], corners[2]), (corners[1], corners[3])):
            points.append(_edge_crossings(lo, h2, lower, upper))
        return np.unique(np.concatenate(points))

    def shifted(self, delta1: float, delta2: float) -> "PiecewiseBilinear":
        return PiecewiseBilinear(self.x1_knots + delta1, self.x2_knots + delta2, self.coefficients)

    def scaled(self, c: float) -> "PiecewiseBilinear":
        return PiecewiseBilinear(self.x1_knots, self.x2_knots, c * self.coefficients)

    def __sub__(self, other: float) -> "PiecewiseBilinear":
        c = self.coefficients.copy()
        c[..., 0] -= other
        return PiecewiseBilinear(self.x1_knots, self.x2_knots, c)

    def require_intervals(self, first: tuple[float, float], second: tuple[float, float]) -> None:
        self.slice_x1(self.x2_knots[0]).require_interval(*first)
        self.slice_x2(self.x1_knots[0]).require_interval(*second)


class TestFunction2D(PiecewiseBilinear):
    """Continuous piecewise-bilinear interpolant of node values on a tensor grid."""
    __test__ = False

    def __init__(self, x1_knots, x2_knots, values):
        x1_knots, x2_knots = _as_knots(x1_knots), _as_knots(x2_knots)
        values = np.asarray(values, dtype=float)
        if values.shape != (x1_knots.size, x2_knots.size) or not np.all(np.isfinite(values)):
            raise ValueError("values must be finite with shape (len(x1_knots), len(x2_knots))")
        h1 = np.diff(x1_knots)[:, None]
        h2 = np.diff(x2_knots)[None, :]
        v00, v10 = values[:-1, :-1], values[1:, :-1]
        v01, v11 = values[:-1, 1:], values[1:, 1:]
        coefficients = np.stack(
            [v00, (v10 - v00) / h1, (v01 - v00) / h2, (v11 - v10 - v01 + v00) / (h1 * h2)],
            axis=-1,
        )
        super().__init__(x1_knots, x2_knots, coefficients)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, f: Callable, x1_knots, x2_knots) -> "TestFunction2D":
        x1_knots, x2_knots = _as_knots(x1_knots), _as_knots(x2_knots)
        grid1, grid2 = np.meshgrid(x1_knots, x2_knots, indexing="ij")
        values = np.asarray(f(grid1, grid2), dtype=float) * np.ones_like(grid1)
        return cls(x1_knots, x2_knots, values)

    @classmethod
    def from_x2_function(cls, g: TestFunction1D, x1_knots) -> "TestFunction2D":
        """F(x1, x2) = g(x2)."""
        x1_knots = _as_knots(x1_knots)
        return cls(x1_knots, g.knots, np.tile(g.values, (x1_knots.size, 1)))

    @classmethod
    def from_x1_function(cls, g: TestFunction1D, x2_knots) -> "TestFunction2D":
        """F(x1, x2) = g(x1)."""
        x2_knots = _as_knots(x2_knots)
        return cls(g.knots, x2_knots, np.tile(g.values[:, None], (1, x2_knots.size)))

    @property
    def lipschitz_bound(self) -> float:
        """Max over cells and corners of |grad F|; grad is affine per cell so corners suffice."""
        c0, c1, c2, c3 = np.moveaxis(self.coefficients, -1, 0)
        h1 = np.diff(self.x1_knots)[:, None]
        h2 = np.diff(self.x2_knots)[None, :]
        norms = [
            np.hypot(c1 + c3 * t, c2 + c3 * s)
            for s in (0.0, h1)
            for t in (0.0, h2)
        ]
        return float(np.max(np.stack(np.broadcast_arrays(*norms))))

    def refined(self, factor: int = 2) -> "TestFunction2D":
        """Same function on a grid with every cell split `factor` times per axis."""
        x1, x2 = refine_knots(self.x1_knots, factor), refine_knots(self.x2_knots, factor)
        grid1, grid2 = np.meshgrid(x1, x2, indexing="ij")
        return TestFunction2D(x1, x2, self(grid1, grid2))

    def minus_x2_function(self, g: PiecewiseLinear) -> "TestFunction2D":
        """F(x1, x2) - g(x2), with g linear between the x2 knots."""
        return TestFunction2D(self.x1_knots, self.x2_knots, self.values - g(self.x2_knots)[None, :])

    def shifted(self, delta1: float, delta2: float) -> "TestFunction2D":
        return TestFunction2D(self.x1_knots + delta1, self.x2_knots + delta2, self.values)

    def scaled(self, c: float) -> "TestFunction2D":
        return TestFunction2D(self.x1_knots, self.x2_knots, c * self.values)

    def __sub__(self, other: float) -> "TestFunction2D":
        return TestFunction2D(self.x1_knots, self.x2_knots, self.values - other)
