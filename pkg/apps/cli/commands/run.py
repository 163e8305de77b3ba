import sys
from pathlib import Path

from lib.console_reporter import ConsoleReporter
from lib.errors import ConfigError, NeutralSdeError
from lib.experiment import run_experiment
from lib.logging import get_logger

logger = get_logger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_FAULT = 3

DEFINITION = {
    "name": "run",
    "description": "Run the tasks of an experiment file and write the report bundle",
    "arguments": [
        {
            "name": "config",
            "type": str,
            "required": True,
            "help": "Experiment file (.json)",
        },
        {
            "name": "output",
            "type": str,
            "required": False,
            "help": "Output directory (default: the one named in the experiment file)",
        },
        {
            "name": "seed",
            "type": int,
            "required": False,
            "help": "Override the master seed of the experiment file",
        },
        {
            "name": "workers",
            "type": int,
            "required": False,
            "help": "Override the number of worker threads",
        },
        {
            "name": "no-progress",
            "action": "store_true",
            "required": False,
            "default": False,
            "help": "Hide the trial progress bar",
        },
    ],
}


def main(
    *,
    config: str,
    output: str | None = None,
    seed: int | None = None,
    workers: int | None = None,
    no_progress: bool = False,
) -> int:
    """
    Main entry point for the run command.

    Returns:
        0 when every report passed, 1 when one failed, 2 on an invalid experiment file
        and 3 on a runtime fault

    """
    path = Path(config)
    if not path.exists():
        print(f"Error: File not found: {config}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    if workers is not None and workers < 1:
        print(f"Error: --workers must be >= 1, got {workers}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    reporter = ConsoleReporter(show_progress=not no_progress)
    try:
        result = run_experiment(
            path,
            Path(output) if output else None,
            workers=workers,
            master_seed=seed,
            reporter=reporter,
        )
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except NeutralSdeError as e:
        logger.exception("Experiment aborted")
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME_FAULT
    except Exception as e:
        logger.exception("Experiment aborted by an unexpected error")
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME_FAULT

    print(f"\nReports written to {result.output_dir}")
    print("=" * 50)
    for outcome in result.outcomes:
        for report in outcome.reports:
            verdict = {True: "pass", False: "FAIL", None: "n/a"}[report.passed]
            print(
                f"[{outcome.index:02d}] {report.name:<45} {verdict:<5} "
                f"{report.point_estimate:.6g} (se {report.std_error:.3g})"
            )
    return result.exit_code
