"""Estimate reports and pass/fail thresholds."""

import json
import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from lib.model.conditions import ConditionReport

MetadataValue = float | int | bool | str | None


class Thresholds(BaseModel):
    """Decision thresholds shared by all estimators."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    se_multiplier: float = Field(default=3.0, gt=0)
    contraction_tolerance: float = Field(default=0.1, ge=0, lt=1)
    tv_tolerance: float = Field(default=0.2, ge=0, lt=1)
    wasserstein_tolerance: float = Field(default=0.25, ge=0, lt=1)
    l2_tolerance: float = Field(default=0.3, ge=0, lt=1)
    heavy_tail_share: float = Field(default=0.5, gt=0, le=1)
    divergence_share: float = Field(default=0.5, gt=0, le=1)
    exp_moment_slope: float = 0.05
    density_overflow: float = Field(default=700.0, gt=0)
    trend_p_value: float = Field(default=0.05, gt=0, lt=1)


class EstimateReport(BaseModel):
    """
    Monte Carlo estimate with its decision.

    ``passed`` is None when the decision is disabled, for instance when the rate
    condition is infeasible or there are too few usable points for a fit.
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    point_estimate: float
    std_error: float = 0.0
    trials: int = 0
    passed: bool | None = None
    bound: float | None = None
    metadata: dict[str, MetadataValue] = Field(default_factory=dict)
    curve: dict[str, list[float | None]] | None = None
    condition: ConditionReport | None = None

    def to_json(self) -> str:
        """Deterministic JSON: sorted keys, non-finite numbers written as null."""
        return dump_json(self.model_dump(mode="python", by_alias=True))


def _finite(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(key): _finite(item) for key, item in value.items()}  # type: ignore[misc]
    if isinstance(value, list | tuple):
        return [_finite(item) for item in value]  # type: ignore[misc]
    return value


def finite_payload(value: Any) -> Any:
    """Copy of a JSON-like value with non-finite floats replaced by None."""
    return _finite(value)


def dump_json(payload: Any) -> str:
    """Deterministic JSON used for every report file."""
    return json.dumps(finite_payload(payload), indent=2, sort_keys=True, allow_nan=False)
