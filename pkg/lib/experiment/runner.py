"""Run a validated experiment and write its report bundle.

Layout of the output directory:

    manifest.json                    config hash, seed, versions, wall clock, exit code
    reports/<NN>_<label>.json        one file per task, condition report embedded
    curves/<NN>_<label>[_<k>].csv    plot-ready curves of the reports that carry one

Report files only depend on the config and the master seed; the wall clock lives in the
manifest alone.
"""

import hashlib
import platform
import re
import time
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any

import pandas as pd

from lib.experiment.config import ExperimentConfig, load_config
from lib.experiment.tasks import TaskContext, get_task
from lib.interfaces import IReporter
from lib.logging import get_logger
from lib.model.conditions import check_conditions
from lib.montecarlo import EstimateReport, MonteCarloOptions, dump_json
from lib.null_reporter import NullReporter
from lib.simulate.noise import derive_seed

logger = get_logger(__name__)

PACKAGES = ["neutral-fsde-ergodicity", "numpy", "scipy", "pandas", "pydantic"]

EXIT_PASSED = 0
EXIT_FAILED = 1


@dataclass
class TaskOutcome:
    index: int
    label: str
    task: str
    seed: int
    reports: list[EstimateReport]

    @property
    def passed(self) -> bool:
        """False when any report failed; disabled judgments (None) are neutral."""
        return all(report.passed is not False for report in self.reports)


@dataclass
class ExperimentResult:
    exit_code: int
    output_dir: Path
    outcomes: list[TaskOutcome] = field(default_factory=list)

    @property
    def manifest_path(self) -> Path:
        return self.output_dir / "manifest.json"


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", label).strip("-") or "task"


def package_versions() -> dict[str, str]:
    versions = {"python": platform.python_version()}
    for package in PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


def _write_task(outcome: TaskOutcome, params: dict[str, Any], output_dir: Path, formats: list[str]) -> None:
    stem = f"{outcome.index:02d}_{_slug(outcome.label)}"
    if "json" in formats:
        reports_dir = output_dir / "reports"
        reports_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "index": outcome.index,
            "label": outcome.label,
            "task": outcome.task,
            "seed": outcome.seed,
            "params": params,
            "passed": outcome.passed,
            "reports": [report.model_dump(mode="python", by_alias=True) for report in outcome.reports],
        }
        (reports_dir / f"{stem}.json").write_text(dump_json(payload) + "\n")
    if "csv" in formats:
        curves = [report.curve for report in outcome.reports if report.curve]
        for position, curve in enumerate(curves):
            curves_dir = output_dir / "curves"
            curves_dir.mkdir(parents=True, exist_ok=True)
            suffix = f"_{position}" if len(curves) > 1 else ""
            pd.DataFrame(curve).to_csv(curves_dir / f"{stem}{suffix}.csv", index=False)


def execute(  # noqa: PLR0913
    config: ExperimentConfig,
    output_dir: Path | None = None,
    *,
    workers: int | None = None,
    master_seed: int | None = None,
    reporter: IReporter | None = None,
    config_hash: str | None = None,
) -> ExperimentResult:
    """
    Run every task of a validated experiment.

    ``check_conditions`` is evaluated first and embedded in every report. Task i runs on
    the seed ``derive_seed(master, i)``; its trials use the streams of that seed.

    Args:
        config: Validated experiment
        output_dir: Overrides the configured output directory
        workers: Overrides the configured worker count
        master_seed: Overrides the configured master seed
        reporter: Progress and message sink
        config_hash: SHA-256 of the config file, recorded in the manifest

    Returns:
        ExperimentResult with exit code 0 when no report failed and 1 otherwise

    Raises:
        NeutralSdeError: On a runtime fault inside a task

    """
    started = time.perf_counter()
    reporter = reporter or NullReporter()
    directory = output_dir or Path(config.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    master = config.seeds.master if master_seed is None else master_seed
    options = MonteCarloOptions(
        workers=workers or config.seeds.workers,
        chunk_size=config.seeds.chunk_size,
        thresholds=config.thresholds,
        reporter=reporter,
    )
    spec = config.build_model()
    condition = check_conditions(spec)
    reporter.on_message(
        f"Model '{spec.name}': lambda={condition.rate}, feasible={condition.feasible}"
    )

    result = ExperimentResult(exit_code=EXIT_PASSED, output_dir=directory)
    for index, task_config in enumerate(config.tasks):
        definition = get_task(task_config.task)
        params = task_config.parsed()
        context = TaskContext(
            spec=spec,
            h=config.grid.h,
            horizon=config.grid.horizon,
            seed=derive_seed(master, index),
            trials=config.seeds.trials,
            options=options,
            condition=condition,
            label=f"{index:02d}_{_slug(task_config.label)}",
            output_dir=directory / "paths",
        )
        logger.info(f"Running task {index} '{task_config.label}' ({definition.name})")
        reporter.on_message(f"[{index}] {task_config.label}")
        reports = [
            report.model_copy(update={"condition": condition})
            for report in definition.runner(context, params)
        ]
        outcome = TaskOutcome(
            index=index,
            label=task_config.label,
            task=definition.name,
            seed=context.seed,
            reports=reports,
        )
        _write_task(outcome, params.model_dump(mode="json"), directory, list(config.output.formats))
        result.outcomes.append(outcome)
        if not outcome.passed:
            logger.warning(f"Task {index} '{task_config.label}' failed")
            result.exit_code = EXIT_FAILED

    manifest = {
        "config_sha256": config_hash,
        "master_seed": master,
        "workers": options.workers,
        "versions": package_versions(),
        "wall_clock_seconds": time.perf_counter() - started,
        "exit_code": result.exit_code,
        "tasks": [
            {
                "index": outcome.index,
                "label": outcome.label,
                "task": outcome.task,
                "seed": outcome.seed,
                "passed": outcome.passed,
            }
            for outcome in result.outcomes
        ],
    }
    result.manifest_path.write_text(dump_json(manifest) + "\n")
    return result


def run_experiment(
    config_path: Path,
    output_dir: Path | None = None,
    *,
    workers: int | None = None,
    master_seed: int | None = None,
    reporter: IReporter | None = None,
) -> ExperimentResult:
    """
    Load, validate and run an experiment file.

    Raises:
        ConfigError: If the file cannot be parsed or validated
        NeutralSdeError: On a runtime fault inside a task

    """
    config = load_config(config_path)
    config_hash = hashlib.sha256(config_path.read_bytes()).hexdigest()
    return execute(
        config,
        output_dir,
        workers=workers,
        master_seed=master_seed,
        reporter=reporter,
        config_hash=config_hash,
    )
