"""Chunked, order-preserving execution of Monte Carlo trials."""

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from lib.errors import InvalidParameterError
from lib.interfaces import IReporter
from lib.logging import get_logger
from lib.montecarlo.report import Thresholds
from lib.null_reporter import NullReporter
from lib.trial_pool import PoolConfig, run_pool

logger = get_logger(__name__)

IndexArray = NDArray[np.int64]


@dataclass(frozen=True)
class MonteCarloOptions:
    """
    Execution settings shared by the estimators.

    ``chunk_size`` fixes how trials are grouped; results never depend on it nor on
    ``workers`` because every trial draws from its own stream.
    """

    workers: int = 1
    chunk_size: int = 500
    thresholds: Thresholds = field(default_factory=Thresholds)
    reporter: IReporter = field(default_factory=NullReporter)


def trial_chunks(trials: int, chunk_size: int) -> list[IndexArray]:
    """Consecutive trial index ranges of at most chunk_size trials."""
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    if chunk_size < 1:
        raise InvalidParameterError(f"chunk_size must be >= 1, got {chunk_size}")
    return [
        np.arange(start, min(start + chunk_size, trials), dtype=np.int64)
        for start in range(0, trials, chunk_size)
    ]


def run_trials[TOutput](
    simulate_chunk: Callable[[IndexArray], TOutput],
    trials: int,
    options: MonteCarloOptions,
) -> list[TOutput]:
    """
    Run ``simulate_chunk`` over all trial chunks and return per-chunk outputs in order.

    Args:
        simulate_chunk: Function of the trial (stream) indices of one chunk
        trials: Total number of trials
        options: Worker count, chunk size and progress reporter

    """
    chunks = trial_chunks(trials, options.chunk_size)
    logger.debug(f"Running {trials} trials in {len(chunks)} chunks on {options.workers} workers")
    reporter = options.reporter
    try:
        reporter.start_progress(total=trials)
        return run_pool(
            chunks,
            simulate_chunk,
            PoolConfig(
                num_workers=options.workers,
                on_progress=reporter.on_progress,
                weight=len,  # type: ignore[arg-type]
            ),
        )
    finally:
        reporter.stop_progress()


def run_trials_concat(
    simulate_chunk: Callable[[IndexArray], NDArray[np.float64]],
    trials: int,
    options: MonteCarloOptions,
) -> NDArray[np.float64]:
    """Like run_trials for chunk outputs that are arrays indexed by trial; concatenated."""
    return np.concatenate(run_trials(simulate_chunk, trials, options), axis=0)
