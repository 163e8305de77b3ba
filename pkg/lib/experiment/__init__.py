"""Config-driven experiments: schema, task registry and runner."""

from lib.experiment.config import ExperimentConfig, TaskConfig, load_config
from lib.experiment.runner import ExperimentResult, TaskOutcome, execute, run_experiment
from lib.experiment.tasks import TASKS, TaskContext, TaskDefinition, describe_task, get_task, list_tasks

__all__ = [
    "TASKS",
    "ExperimentConfig",
    "ExperimentResult",
    "TaskConfig",
    "TaskContext",
    "TaskDefinition",
    "TaskOutcome",
    "describe_task",
    "execute",
    "get_task",
    "list_tasks",
    "load_config",
    "run_experiment",
]
