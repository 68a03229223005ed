from enum import Enum
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from orlicz_lab.numerics.functions import TestFunction1D, TestFunction2D
from orlicz_lab.numerics.measure import WeightedMeasure1D
from orlicz_lab.numerics.young import PowerYoung, YoungFunction, young_from_spec
from orlicz_lab.verify.battery import DEFAULT_GRID, CheckKind, Family, build_family, default_grid
from orlicz_lab.verify.checks import Experiment, StatementExponent


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Young functions

class PowerPhiSpec(StrictModel):
    kind: Literal["power"]
    q: float = Field(..., ge=1.0, description="Exponent of Phi(t) = |t|^q")

    def build(self) -> YoungFunction:
        return young_from_spec(self.kind, q=self.q)


class ExpPowerPhiSpec(StrictModel):
    kind: Literal["exp_power"]
    q: float = Field(..., ge=1.0, description="Exponent of Phi(t) = exp(|t|^q) - 1")

    def build(self) -> YoungFunction:
        return young_from_spec(self.kind, q=self.q)


class TabulatedPhiSpec(StrictModel):
    kind: Literal["tabulated"]
    knots: list[tuple[float, float]] = Field(..., min_length=2, description="(t, Phi(t)) pairs starting at (0, 0)")

    def build(self) -> YoungFunction:
        return young_from_spec(self.kind, knots=self.knots)


PhiSpec = Annotated[PowerPhiSpec | ExpPowerPhiSpec | TabulatedPhiSpec, Field(discriminator="kind")]


# Densities and measures

class ConstantDensitySpec(StrictModel):
    kind: Literal["constant"]
    c: float = Field(1.0, ge=0.0, description="Constant density value")

    def build(self, a: float, b: float) -> WeightedMeasure1D:
        return WeightedMeasure1D.constant(a, b, self.c)


class PowerLawDensitySpec(StrictModel):
    kind: Literal["power_law"]
    alpha: float = Field(..., gt=-1.0, description="Density (t - a)^alpha")

    def build(self, a: float, b: float) -> WeightedMeasure1D:
        return WeightedMeasure1D.power_law(a, b, self.alpha)


class TabulatedDensitySpec(StrictModel):
    kind: Literal["tabulated"]
    knots: list[tuple[float, float]] = Field(..., min_length=2, description="(t, w(t)) pairs covering [a, b]")

    def build(self, a: float, b: float) -> WeightedMeasure1D:
        return WeightedMeasure1D.tabulated(a, b, self.knots)


FactorSpec = Annotated[
    ConstantDensitySpec | PowerLawDensitySpec | TabulatedDensitySpec, Field(discriminator="kind")
]


class ProductDensitySpec(StrictModel):
    kind: Literal["product"]
    first: FactorSpec = Field(..., description="First factor")
    second: FactorSpec = Field(..., description="Second factor")

    def build(self, a: float, b: float) -> WeightedMeasure1D:
        return WeightedMeasure1D.product(self.first.build(a, b), self.second.build(a, b))


DensitySpec = Annotated[
    ConstantDensitySpec | PowerLawDensitySpec | TabulatedDensitySpec | ProductDensitySpec,
    Field(discriminator="kind"),
]


class MeasureSpec(StrictModel):
    interval: tuple[float, float] = Field((0.0, 1.0), description="[a, b]")
    density: DensitySpec = Field(default_factory=lambda: ConstantDensitySpec(kind="constant"))

    def build(self) -> WeightedMeasure1D:
        return self.density.build(*self.interval)


class MeasuresSpec(StrictModel):
    mu1: MeasureSpec = Field(default_factory=MeasureSpec)
    mu2: MeasureSpec = Field(default_factory=MeasureSpec)
    nu1: MeasureSpec = Field(default_factory=MeasureSpec)
    nu2: MeasureSpec = Field(default_factory=MeasureSpec)
    w1: MeasureSpec = Field(default_factory=MeasureSpec)
    w2: MeasureSpec = Field(default_factory=MeasureSpec)

    def build(self) -> dict[str, WeightedMeasure1D]:
        return {name: getattr(self, name).build() for name in ("mu1", "mu2", "nu1", "nu2", "w1", "w2")}


# Test functions

class BilinearFunctionSpec(StrictModel):
    """c00 + c10 x1 + c01 x2 + c11 x1 x2 on an n1 x n2 grid of I x J."""
    kind: Literal["bilinear"]
    coefficients: tuple[float, float, float, float] = Field(..., description="(c00, c10, c01, c11)")
    grid: tuple[int, int] = Field((2, 2), description="Knots per axis")

    @model_validator(mode="after")
    def _grid_size(self):
        if min(self.grid) < 2:
            raise ValueError("grid needs at least two knots per axis")
        return self

    def build(self, intervals) -> TestFunction2D:
        (a, b), (c, d) = intervals
        c00, c10, c01, c11 = self.coefficients
        return TestFunction2D.from_callable(
            lambda x1, x2: c00 + c10 * x1 + c01 * x2 + c11 * x1 * x2,
            np.linspace(a, b, self.grid[0]),
            np.linspace(c, d, self.grid[1]),
        )


class NodesFunctionSpec(StrictModel):
    kind: Literal["nodes"]
    x1_knots: list[float] = Field(..., min_length=2)
    x2_knots: list[float] = Field(..., min_length=2)
    values: list[list[float]] = Field(..., description="values[i][j] = F(x1_knots[i], x2_knots[j])")

    def build(self, intervals) -> TestFunction2D:
        return TestFunction2D(self.x1_knots, self.x2_knots, self.values)


class RampFunctionSpec(StrictModel):
    """clip((x_axis - start) / delta, 0, 1), constant in the other variable."""
    kind: Literal["ramp"]
    axis: Literal[1, 2] = 2
    start: float
    delta: float = Field(..., gt=0.0)

    def profile(self, a: float, b: float) -> TestFunction1D:
        knots = sorted({a, b, *(t for t in (self.start, self.start + self.delta) if a < t < b)})
        return TestFunction1D(knots, np.clip((np.asarray(knots) - self.start) / self.delta, 0.0, 1.0))

    def build(self, intervals) -> TestFunction2D:
        (a, b), (c, d) = intervals
        if self.axis == 1:
            return TestFunction2D.from_x1_function(self.profile(a, b), [c, d])
        return TestFunction2D.from_x2_function(self.profile(c, d), [a, b])


FunctionSpec = Annotated[
    BilinearFunctionSpec | NodesFunctionSpec | RampFunctionSpec, Field(discriminator="kind")
]


class NodesFunction1DSpec(StrictModel):
    kind: Literal["nodes"]
    knots: list[float] = Field(..., min_length=2)
    values: list[float] = Field(..., min_length=2)

    def build(self, interval) -> TestFunction1D:
        return TestFunction1D(self.knots, self.values)


class AffineFunction1DSpec(StrictModel):
    kind: Literal["affine"]
    intercept: float = 0.0
    slope: float = 0.0

    def build(self, interval) -> TestFunction1D:
        return TestFunction1D(list(interval), [self.intercept + self.slope * t for t in interval])


class RampFunction1DSpec(StrictModel):
    kind: Literal["ramp"]
    start: float
    delta: float = Field(..., gt=0.0)

    def build(self, interval) -> TestFunction1D:
        return RampFunctionSpec(kind="ramp", start=self.start, delta=self.delta).profile(*interval)


Function1DSpec = Annotated[
    NodesFunction1DSpec | AffineFunction1DSpec | RampFunction1DSpec, Field(discriminator="kind")
]


# Norm requests

class NormKind(str, Enum):
    GAUGE1D = "gauge1d"
    GAUGE2D = "gauge2d"
    LP = "lp"
    LP2D = "lp2d"
    MIXED_P_PHI = "mixed_p_phi"
    HAT = "hat"
    PQ = "pq"
    ITERATED = "iterated"


ONE_DIMENSIONAL = (NormKind.GAUGE1D, NormKind.LP)

MeasureName = Literal["mu1", "mu2", "nu1", "nu2", "w1", "w2"]


class NormSpec(StrictModel):
    kinds: list[NormKind] = Field(default_factory=list, description="Norms to evaluate; empty means all that apply")
    p: float = Field(2.0, ge=1.0, description="Exponent of L^p, of the inner norm of mixed norms")
    s: float = Field(2.0, ge=1.0, description="Exponent of the outer norm of hat and pq")
    measure: MeasureName = Field("mu1", description="Measure of the one-dimensional norms")
    function: FunctionSpec | None = Field(None, description="Two-variable test function")
    function_1d: Function1DSpec | None = Field(None, description="One-variable test function")


# Experiments

class FamilySpec(StrictModel):
    family: Family
    grid: int = Field(DEFAULT_GRID, ge=2, description="Knots per axis")
    count: int = Field(10, ge=1, description="Members of seeded or ramp families")
    seed: int | None = Field(None, description="Overrides the run seed for random families")

    def build(self, intervals, run_seed: int) -> list[tuple[str, TestFunction2D]]:
        seed = run_seed if self.seed is None else self.seed
        return build_family(self.family, intervals, self.grid, self.count, seed)


def _default_families() -> list[FamilySpec]:
    return [FamilySpec(family=family) for family in Family]


class ExperimentConfig(StrictModel):
    name: str = Field("experiment", description="Prefix of every report name")
    phi: PhiSpec = Field(default_factory=lambda: PowerPhiSpec(kind="power", q=2.0))
    measures: MeasuresSpec = Field(default_factory=MeasuresSpec)
    p1: float = Field(2.0, ge=1.0)
    p2: float = Field(2.0, ge=1.0)
    s1: float = Field(2.0, ge=1.0)
    checks: list[CheckKind] = Field(default_factory=lambda: list(CheckKind))
    families: list[FamilySpec] | None = Field(None, description="Defaults to the run-level families")
    sharpness_axes: list[Literal[1, 2]] = Field(default_factory=list, description="Ramp probes to run")
    refinement_check: bool = Field(False, description="Recompute theorem checks on doubled grids")

    def build(self, statement_exponent: StatementExponent, tolerance: float, abs_floor: float, c1_scale: float = 1.0) -> Experiment:
        return Experiment(
            phi=self.phi.build(),
            **self.measures.build(),
            p1=self.p1,
            p2=self.p2,
            s1=self.s1,
            name=self.name,
            statement_exponent=statement_exponent,
            tolerance=tolerance,
            abs_floor=abs_floor,
            c1_scale=c1_scale,
        )


class DefaultGridSpec(StrictModel):
    """Power(q) x density x p grid with the same density for all six measures."""
    q_values: list[float] = Field([2.0, 3.0, 4.0], min_length=1)
    p_values: list[float] = Field([1.0, 2.0], min_length=1)
    checks: list[CheckKind] = Field(default_factory=lambda: list(CheckKind))

    def build(self, **overrides) -> list[Experiment]:
        phis = {f"power_{q:g}": PowerYoung(float(q)) for q in self.q_values}
        return default_grid(phis, p_values=tuple(self.p_values), **overrides)


class RunConfig(StrictModel):
    seed: int = Field(0, description="Seed of the random test-function families")
    experiments: list[ExperimentConfig] = Field(default_factory=list)
    default_grid: DefaultGridSpec | None = Field(None, description="Append the default configuration grid")
    families: list[FamilySpec] = Field(default_factory=_default_families)
    norm: NormSpec | None = Field(None, description="Request of the norm command")

    @model_validator(mode="after")
    def _has_experiment(self):
        if not self.experiments and self.default_grid is None:
            self.experiments = [ExperimentConfig()]
        return self


class RunOptions(BaseModel):
    """Command-line overrides layered over the settings object."""
    seed: int | None = Field(None, description="Overrides the config seed")
    jobs: int = Field(1, ge=1, description="Worker threads for battery entries")
    out_dir: str | None = Field(None, description="Directory receiving the run files")
    statement_exponent: StatementExponent = Field(StatementExponent.PROOF, description="Exponent of nu1(I) in C2's prefactor")
    tolerance: float = Field(1e-5, gt=0.0, description="Relative tolerance of every inequality")
    abs_floor: float = Field(1e-12, ge=0.0, description="Absolute floor added to every right-hand side")
    kind: NormKind | None = Field(None, description="Single norm requested by the norm command")
    c1_scale: float = Field(1.0, gt=0.0, description="Multiplier applied to C1")
