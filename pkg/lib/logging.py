"""Logging setup for experiment runs.

Library modules only call ``get_logger(__name__)``; the CLI entry point calls
``setup_logging`` once per experiment run with the level given by ``--log-level``.
"""

import logging
import sys
from enum import Enum

ROOT = "lib"


class LogLevel(Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def setup_logging(
    level: str | LogLevel = LogLevel.WARNING,
    format_string: str | None = None,
    include_timestamp: bool = True,
) -> logging.Logger:
    """
    Send every record to stdout and route Python warnings through the same handler.

    numpy and scipy report overflow and degenerate fits as ``RuntimeWarning``; captured,
    they appear next to the estimator logs that explain them.

    Args:
        level: Level name or LogLevel
        format_string: Custom layout, replaces the default one
        include_timestamp: Prefix records with the wall clock

    Returns:
        The logger of the library package

    """
    level_name = level.value if isinstance(level, LogLevel) else level.upper()

    if format_string is None:
        fields = ["%(name)s", "%(levelname)s", "%(message)s"]
        if include_timestamp:
            fields.insert(0, "%(asctime)s")
        format_string = "  ".join(fields)

    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format=format_string,
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stdout,
        force=True,
    )
    logging.captureWarnings(True)
    return logging.getLogger(ROOT)


def get_logger(name: str) -> logging.Logger:
    """Module logger; records are named after the module so task logs can be filtered."""
    return logging.getLogger(name)
