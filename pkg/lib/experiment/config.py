"""Experiment configuration files.

An experiment is a JSON document validated before anything runs:

    {
      "model": {"name": "scalar_linear", "parameters": {"a": 6.0}},
      "grid": {"h": 0.01, "horizon": 4.0},
      "seeds": {"master": 7, "trials": 2000},
      "tasks": [{"task": "contraction_curve", "params": {"horizon": 2.0}}],
      "output": {"directory": "results"}
    }
"""

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from lib.errors import ConfigError, NeutralSdeError
from lib.experiment.params import TaskParams
from lib.experiment.tasks import get_task
from lib.logging import get_logger
from lib.model.builtin import builtin_model, linear_system
from lib.model.spec import ModelSpec
from lib.montecarlo import Thresholds
from lib.segment import grid_steps

logger = get_logger(__name__)


class LinearTableConfig(BaseModel):
    """Inline linear model Z(x) = A x, b(xi) = B xi(-r0)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    drift_matrix: list[list[float]]
    delay_matrix: list[list[float]] | None = None
    sigma: float | list[list[float]] = 1.0
    kappa: float = Field(default=0.0, ge=0, lt=1)
    r0: float = Field(default=0.2, gt=0)
    delta: float = Field(default=0.05, ge=0)
    constants: dict[str, float] | None = None


class ModelConfig(BaseModel):
    """Either a registered model by name or an inline coefficient table."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str | None = None
    parameters: dict[str, Any] = Field(default_factory=dict)
    table: LinearTableConfig | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "ModelConfig":
        if (self.name is None) == (self.table is None):
            raise ValueError("a model needs exactly one of 'name' or 'table'")
        if self.table is not None and self.parameters:
            raise ValueError("'parameters' only applies to registered models")
        return self

    def build(self) -> ModelSpec:
        """
        Raises:
            UnknownModelError: If the name is not registered
            InvalidModelError: If the parameters are inconsistent

        """
        if self.table is not None:
            return linear_system(**self.table.model_dump())
        return builtin_model(str(self.name), self.parameters)


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    h: float = Field(gt=0)
    horizon: float = Field(gt=0)


class SeedConfig(BaseModel):
    """Master seed and Monte Carlo budget; chunk_size fixes the trial grouping."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    master: int = Field(default=0, ge=0)
    trials: int = Field(default=1000, ge=1)
    workers: int = Field(default=1, ge=1)
    chunk_size: int = Field(default=500, ge=1)


class TaskConfig(BaseModel):
    """One task invocation; ``params`` is validated against the task's schema."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    task: str
    name: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.name or self.task

    def parsed(self) -> TaskParams:
        """
        Raises:
            UnknownTaskError: If the task is not registered
            pydantic.ValidationError: If the parameters do not fit the task

        """
        return get_task(self.task).params_model.model_validate(self.params)


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    directory: str = "results"
    formats: list[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])


class ExperimentConfig(BaseModel):
    """Whole experiment file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    model: ModelConfig
    grid: GridConfig
    seeds: SeedConfig = Field(default_factory=SeedConfig)
    thresholds: Thresholds = Field(default_factory=Thresholds)
    tasks: list[TaskConfig] = Field(min_length=1)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        try:
            spec = self.model.build()
            m = spec.delay_steps(self.grid.h)
            grid_steps(self.grid.horizon, self.grid.h)
            for index, task in enumerate(self.tasks):
                params = task.parsed()
                for segment in params.segments():
                    segment.build(m, self.grid.h, spec.dim)
                for t in params.required_times(spec.r0):
                    grid_steps(t, self.grid.h)
                    if t > self.grid.horizon * (1 + 1e-12):
                        raise ValueError(
                            f"task {index} ({task.label}) needs time {t} beyond the horizon "
                            f"{self.grid.horizon}"
                        )
        except NeutralSdeError as e:
            raise ValueError(str(e)) from e
        return self

    def build_model(self) -> ModelSpec:
        return self.model.build()


def load_config(path: Path) -> ExperimentConfig:
    """
    Read and validate an experiment file.

    Raises:
        ConfigError: On unreadable JSON or any validation failure

    """
    try:
        document = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    try:
        config = ExperimentConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment {path}:\n{e}") from e
    logger.info(f"Loaded experiment {path} with {len(config.tasks)} tasks")
    return config
