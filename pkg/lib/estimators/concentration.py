"""Exponential moments E exp(eps ||X_t||^2) of the segment process."""

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.coupling.girsanov import safe_exp
from lib.errors import InvalidParameterError
from lib.estimators.paths import check_trials, sample_windows
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.montecarlo import EstimateReport, MonteCarloOptions, fit_log_rate, mean_se, top_share
from lib.segment import Segment, sup_norm

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

TOP_PERCENTILE = 0.01
# Below this many trials the top 1% is a single sample
HEAVY_TAIL_MIN_TRIALS = 100


def _moment_samples(
    spec: ModelSpec,
    xi: Segment,
    epsilon: float,
    times: ArrayLike,
    trials: int,
    seed: int,
    options: MonteCarloOptions,
) -> FloatArray:
    if epsilon < 0:
        raise InvalidParameterError(f"epsilon must be nonnegative, got {epsilon}")
    check_trials(trials)
    windows = sample_windows(spec, xi, times, trials, seed=seed, options=options)
    if epsilon == 0:
        return np.ones(windows.shape[:2])
    return safe_exp(epsilon * sup_norm(windows) ** 2)


def _heavy_tailed(samples: FloatArray, options: MonteCarloOptions) -> tuple[bool, float]:
    share = top_share(samples, TOP_PERCENTILE)
    heavy = samples.size >= HEAVY_TAIL_MIN_TRIALS and share > options.thresholds.heavy_tail_share
    return heavy, share


def exp_moment(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    epsilon: float,
    t: float,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Monte Carlo estimate of E exp(eps ||X_t(xi)||^2).

    Passes when the estimate is finite and the top 1% of the samples carries no more than
    the heavy-tail share of their sum.

    Raises:
        InvalidParameterError: If epsilon < 0 or trials < 1

    """
    options = options or MonteCarloOptions()
    samples = _moment_samples(spec, xi, epsilon, [t], trials, seed, options)[:, 0]
    estimate, std_error = mean_se(samples)
    heavy, share = _heavy_tailed(samples, options)
    if heavy:
        logger.warning(f"Exponential moment at t={t} is heavy-tailed (top 1% share {share:.2f})")
    return EstimateReport(
        name="exp_moment",
        point_estimate=estimate,
        std_error=std_error,
        trials=trials,
        passed=math.isfinite(estimate) and not heavy,
        metadata={"t": t, "epsilon": epsilon, "top_share": share, "heavy_tail": heavy},
    )


def exp_moment_trend(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    epsilon: float,
    t_grid: ArrayLike,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Exponential moments along a time grid from one set of paths.

    Passes when every estimate is finite, none is heavy-tailed and the slope of the log
    estimate against t is at most the configured bound (uniform boundedness in t).
    ``point_estimate`` is the largest estimate.
    """
    options = options or MonteCarloOptions()
    times = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    samples = _moment_samples(spec, xi, epsilon, times, trials, seed, options)
    estimates: list[float] = []
    errors: list[float] = []
    heavy_any = False
    for column in samples.T:
        estimate, std_error = mean_se(column)
        estimates.append(estimate)
        errors.append(std_error)
        heavy_any |= _heavy_tailed(column, options)[0]
    fit = fit_log_rate(times, estimates)
    slope = fit.slope if fit else 0.0
    bounded = all(math.isfinite(value) for value in estimates)
    passed = bounded and not heavy_any and slope <= options.thresholds.exp_moment_slope
    return EstimateReport(
        name="exp_moment_trend",
        point_estimate=max(estimates),
        std_error=errors[int(np.argmax(estimates))],
        trials=trials,
        passed=passed,
        bound=options.thresholds.exp_moment_slope,
        metadata={"epsilon": epsilon, "slope": slope, "heavy_tail": heavy_any},
        curve={"time": times.tolist(), "estimate": estimates, "std_error": errors},
    )
