"""Schemas of segments, observables and task parameters in experiment files."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lib.errors import DimensionMismatchError, GridMismatchError
from lib.estimators.observables import Observable, build_observable
from lib.segment import FloatArray, Segment

Vector = float | list[float]


class SegmentConfig(BaseModel):
    """
    Initial segment: exactly one of ``constant``, ``linear`` or ``values``.

    ``constant`` and the ends of ``linear`` are scalars (broadcast to every coordinate) or
    n-vectors; ``values`` lists the m+1 node values from phi(-r0) to phi(0).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    constant: Vector | None = None
    linear: tuple[Vector, Vector] | None = None
    values: list[list[float]] | None = None

    @model_validator(mode="after")
    def _one_form(self) -> "SegmentConfig":
        given = [form for form in (self.constant, self.linear, self.values) if form is not None]
        if len(given) != 1:
            raise ValueError("a segment needs exactly one of 'constant', 'linear' or 'values'")
        return self

    def build(self, m: int, h: float, dim: int) -> Segment:
        """
        Materialise the segment on the grid.

        Raises:
            DimensionMismatchError: If a vector does not have dim entries
            GridMismatchError: If ``values`` does not have m+1 rows

        """
        if self.values is not None:
            segment = Segment(np.asarray(self.values, dtype=np.float64), h)
            if segment.m != m:
                raise GridMismatchError(f"segment has {segment.m + 1} nodes, expected {m + 1}")
            if segment.dim != dim:
                raise DimensionMismatchError(dim, segment.dim, what="segment")
            return segment
        if self.linear is not None:
            start, end = self.linear
            return Segment.linear(_vector(start, dim), _vector(end, dim), m, h)
        return Segment.constant(_vector(self.constant or 0.0, dim), m, h)


def _vector(value: Vector, dim: int) -> FloatArray:
    vector = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if vector.size == 1:
        return np.full(dim, float(vector[0]))
    if vector.size != dim:
        raise DimensionMismatchError(dim, vector.size, what="segment value")
    return vector


class ObservableConfig(BaseModel):
    """Registered observable by name with its keyword parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _known(self) -> "ObservableConfig":
        self.build()
        return self

    def build(self) -> Observable:
        return build_observable(self.name, self.params)


ZERO = SegmentConfig(constant=0.0)
ONE = SegmentConfig(constant=1.0)
DEFAULT_OBSERVABLE = ObservableConfig(name="capped_head_norm")


class TaskParams(BaseModel):
    """Base of every task's parameters; ``trials`` overrides the experiment default."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    trials: int | None = Field(default=None, ge=1)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        """Simulated lengths that must be grid multiples within the horizon."""
        return []

    def segments(self) -> list[SegmentConfig]:
        return [value for _, value in self if isinstance(value, SegmentConfig)]


class NoParams(TaskParams):
    pass


class VerifyParams(TaskParams):
    sample_count: int = Field(default=1000, ge=1)
    radius: float = Field(default=5.0, gt=0)


class VerifyH2Params(VerifyParams):
    knots: int = Field(default=4, ge=2)


class PathParams(TaskParams):
    """Single path from xi up to t, optionally written as CSV."""

    xi: SegmentConfig = ONE
    t: float = Field(default=1.0, gt=0)
    stream: int = Field(default=0, ge=0)
    export: bool = True
    tolerance: float | None = Field(default=None, gt=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.t]


class CouplingParams(TaskParams):
    """Coupled pair from (xi, eta) with coupling horizon t."""

    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    t: float = Field(default=1.0, gt=0)
    stream: int = Field(default=0, ge=0)
    tol: float | None = Field(default=None, gt=0)
    export: bool = True
    tolerance: float | None = Field(default=None, gt=0)

    def required_times(self, r0: float) -> list[float]:
        return [self.t, self.t + r0]


class PairParams(TaskParams):
    """Monte Carlo over coupled pairs with coupling horizon t."""

    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    t: float = Field(default=1.0, gt=0)

    def required_times(self, r0: float) -> list[float]:
        return [self.t, self.t + r0]


class ContractionParams(TaskParams):
    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    horizon: float = Field(default=2.0, gt=0)
    stream: int = Field(default=0, ge=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.horizon]


class ExpMomentParams(TaskParams):
    xi: SegmentConfig = ONE
    epsilon: float = Field(default=0.1, ge=0)
    t: float = Field(default=1.0, ge=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.t]


class ExpMomentTrendParams(TaskParams):
    xi: SegmentConfig = ONE
    epsilon: float = Field(default=0.1, ge=0)
    t_grid: list[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0], min_length=1)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return list(self.t_grid)


class HarnackParams(TaskParams):
    observable: ObservableConfig = DEFAULT_OBSERVABLE
    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    t_total: float = Field(default=0.4, gt=0)
    c: float = Field(default=1.0, ge=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.t_total]


class HarnackProtocolParams(TaskParams):
    observable: ObservableConfig = DEFAULT_OBSERVABLE
    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    t_total: float = Field(default=0.4, gt=0)
    factor: float = Field(default=1.5, ge=1)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.t_total]


class CouplingHarnackParams(PairParams):
    observable: ObservableConfig = DEFAULT_OBSERVABLE


class LawParams(PairParams):
    observables: list[ObservableConfig] = Field(
        default_factory=lambda: [ObservableConfig(name="constant"), DEFAULT_OBSERVABLE],
        min_length=1,
    )


class TvParams(TaskParams):
    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    t_grid: list[float] = Field(default_factory=lambda: [0.2, 0.4, 0.8, 1.2], min_length=1)
    coupling_horizon: float | None = Field(default=None, gt=0)
    burn_in: float = Field(default=0.0, ge=0)

    def required_times(self, r0: float) -> list[float]:
        horizon = r0 if self.coupling_horizon is None else self.coupling_horizon
        return [*self.t_grid, *(t + r0 for t in self.t_grid), horizon]


class CauchyParams(TaskParams):
    xi: SegmentConfig = ONE
    t1: float = Field(default=1.0, gt=0)
    t2: float = Field(default=2.0, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "CauchyParams":
        if self.t2 < self.t1:
            raise ValueError("t2 must not precede t1")
        return self

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.t1, self.t2]


class CauchyDecayParams(TaskParams):
    xi: SegmentConfig = ONE
    t1_grid: list[float] = Field(default_factory=lambda: [0.4, 0.8, 1.2], min_length=1)
    offset: float = Field(default=1.0, ge=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [*self.t1_grid, self.offset, *(t + self.offset for t in self.t1_grid)]


class NestedParams(TaskParams):
    observable: ObservableConfig = DEFAULT_OBSERVABLE
    warmup: float = Field(default=2.0, ge=0)
    trials_outer: int = Field(default=200, ge=1)
    trials_inner: int = Field(default=50, ge=1)
    start: SegmentConfig = ZERO


class L2Params(NestedParams):
    t_grid: list[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.8], min_length=1)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.warmup, *self.t_grid]


class HyperParams(NestedParams):
    t: float = Field(default=1.0, ge=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.warmup, self.t]


class AgreementParams(TaskParams):
    observable: ObservableConfig = DEFAULT_OBSERVABLE
    xi: SegmentConfig = ONE
    eta: SegmentConfig = ZERO
    t: float = Field(default=2.0, gt=0)

    def required_times(self, r0: float) -> list[float]:  # noqa: ARG002
        return [self.t]
