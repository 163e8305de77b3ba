"""Wasserstein-Cauchy bound W(P_{t1}(xi), P_{t2}(xi)) with rho = 1 ∧ ||.||_inf.

X runs from xi over [0, t2]; X' restarts from xi at t2 - t1 and uses the same increments
from then on. E[1 ∧ ||X_{t2} - X'_{t2}||_inf] bounds the distance from above.
"""

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.errors import InvalidParameterError
from lib.estimators.paths import certified_rate, check_trials, rate_judgment, time_indices
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.montecarlo import EstimateReport, MonteCarloOptions, fit_log_rate, mean_se, run_trials_concat
from lib.montecarlo.sampling import IndexArray
from lib.segment import Segment, grid_steps, sup_norm
from lib.simulate.integrator import integrate_batch, windows_of
from lib.simulate.noise import noise_block

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]


def _cauchy_samples(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    t1_grid: FloatArray,
    offset: float,
    trials: int,
    seed: int,
    options: MonteCarloOptions,
) -> FloatArray:
    """1 ∧ ||X_{t1+offset} - X'_{t1+offset}||_inf for every trial and every t1, (trials, T)."""
    spec.check_segment(xi)
    check_trials(trials)
    if offset < 0:
        raise InvalidParameterError(f"t2 must not precede t1 (offset {offset})")
    if np.any(t1_grid <= 0):
        raise InvalidParameterError("t1 must be positive")
    h, m = xi.h, xi.m
    shift = grid_steps(offset, h)
    indices = time_indices(t1_grid, h)
    late = max(indices)

    def simulate_chunk(ids: IndexArray) -> FloatArray:
        increments = noise_block(seed, ids, shift + late, h, spec.dim)
        full = integrate_batch(spec, xi.stacked(len(ids)), increments, h)
        restarted = integrate_batch(spec, xi.stacked(len(ids)), increments[:, shift:], h)
        full_windows = windows_of(full, m)[:, [shift + k for k in indices]]
        restarted_windows = windows_of(restarted, m)[:, indices]
        return np.minimum(1.0, sup_norm(full_windows - restarted_windows))

    return run_trials_concat(simulate_chunk, trials, options)


def wasserstein_cauchy(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    t1: float,
    t2: float,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Upper bound on W(P_{t1}(xi), P_{t2}(xi)) for one pair of times.

    A single pair has no decay to judge, so ``passed`` is None; use wasserstein_decay
    for the rate check.

    Raises:
        InvalidParameterError: Unless t2 >= t1 > 0

    """
    options = options or MonteCarloOptions()
    samples = _cauchy_samples(spec, xi, np.array([t1]), t2 - t1, trials, seed, options)[:, 0]
    estimate, std_error = mean_se(samples)
    return EstimateReport(
        name="wasserstein_cauchy",
        point_estimate=estimate,
        std_error=std_error,
        trials=trials,
        passed=None,
        metadata={"t1": t1, "t2": t2},
    )


def wasserstein_decay(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    t1_grid: ArrayLike,
    offset: float,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Cauchy bounds along t1 at a fixed offset t2 - t1, with a rate judgment.

    Passes when the fitted log-slope in t1 is at most -(1 - tolerance) lambda / 2.
    ``point_estimate`` is the bound at the largest t1.
    """
    options = options or MonteCarloOptions()
    times = np.atleast_1d(np.asarray(t1_grid, dtype=np.float64))
    samples = _cauchy_samples(spec, xi, times, offset, trials, seed, options)
    estimates: list[float] = []
    errors: list[float] = []
    for column in samples.T:
        estimate, std_error = mean_se(column)
        estimates.append(estimate)
        errors.append(std_error)

    condition, rate = certified_rate(spec)
    required = None if rate is None else -(1.0 - options.thresholds.wasserstein_tolerance) * rate / 2.0
    fit = fit_log_rate(times, estimates)
    passed = rate_judgment(fit, required)
    if required is not None and not any(value > 0 for value in estimates):
        passed = True
    return EstimateReport(
        name="wasserstein_decay",
        point_estimate=estimates[-1],
        std_error=errors[-1],
        trials=trials,
        passed=passed,
        bound=required,
        metadata={
            "offset": offset,
            "lambda": rate,
            "slope": fit.slope if fit else math.nan,
            "fit_points": fit.points if fit else 0,
        },
        curve={"t1": times.tolist(), "estimate": estimates, "std_error": errors},
        condition=condition,
    )
