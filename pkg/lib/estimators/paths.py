"""Batched path sampling and rate judgments shared by the estimators."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.errors import GridMismatchError, InvalidParameterError
from lib.logging import get_logger
from lib.model.conditions import ConditionReport, check_conditions
from lib.model.spec import ModelSpec
from lib.montecarlo import MonteCarloOptions, RateFit, run_trials_concat
from lib.montecarlo.sampling import IndexArray
from lib.segment import Segment, grid_steps
from lib.simulate.integrator import integrate_batch, windows_of
from lib.simulate.noise import noise_block

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]


def time_indices(times: ArrayLike, h: float) -> list[int]:
    """
    Grid indices of nonnegative times.

    Raises:
        GridMismatchError: If a time is not a multiple of h

    """
    return [grid_steps(float(t), h) for t in np.atleast_1d(np.asarray(times, dtype=np.float64))]


def check_pair(spec: ModelSpec, xi: Segment, eta: Segment) -> None:
    """
    Raises:
        DimensionMismatchError: If the segments do not match the model dimension
        GridMismatchError: If the segments live on different grids

    """
    spec.check_segment(xi)
    if not xi.same_grid(eta):
        raise GridMismatchError("xi and eta live on different grids")


def check_trials(trials: int, what: str = "trials") -> None:
    if trials < 1:
        raise InvalidParameterError(f"{what} must be >= 1, got {trials}")


def windows_at(
    spec: ModelSpec,
    initial: FloatArray,
    increments: FloatArray,
    indices: list[int],
    h: float,
) -> FloatArray:
    """
    Integrate a batch and pick the windows at the given step indices.

    Returns:
        Windows (B, len(indices), m+1, n)

    """
    m = initial.shape[1] - 1
    states = integrate_batch(spec, initial, increments[:, : max(indices, default=0)], h)
    return windows_of(states, m)[:, indices]


def sample_windows(  # noqa: PLR0913
    spec: ModelSpec,
    initial: Segment,
    times: ArrayLike,
    trials: int,
    *,
    seed: int,
    options: MonteCarloOptions,
) -> FloatArray:
    """
    Segments X_t(initial) for every trial and every requested time.

    Trial i is driven by stream i of ``seed``.

    Returns:
        Windows (trials, len(times), m+1, n)

    """
    check_trials(trials)
    spec.check_segment(initial)
    indices = time_indices(times, initial.h)
    steps = max(indices, default=0)

    def simulate_chunk(ids: IndexArray) -> FloatArray:
        increments = noise_block(seed, ids, steps, initial.h, spec.dim)
        return windows_at(spec, initial.stacked(len(ids)), increments, indices, initial.h)

    return run_trials_concat(simulate_chunk, trials, options)


def certified_rate(spec: ModelSpec) -> tuple[ConditionReport, float | None]:
    """Condition report and the certified rate, None when the certificate is infeasible."""
    condition = check_conditions(spec)
    if not condition.feasible:
        logger.warning(f"Rate condition of '{spec.name}' is infeasible; judgment disabled")
        return condition, None
    return condition, condition.rate


def rate_judgment(fit: RateFit | None, required: float | None) -> bool | None:
    """slope <= required, None when there is no certificate or no fit."""
    if fit is None or required is None:
        return None
    return fit.slope <= required
