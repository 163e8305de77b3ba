"""Order-independent sample statistics and rate fits."""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats


def mean_se(samples: ArrayLike) -> tuple[float, float]:
    """
    Sample mean and its standard error, summed with math.fsum.

    The standard error is 0 for fewer than two samples.
    """
    values = np.asarray(samples, dtype=np.float64).ravel()
    count = values.size
    if count == 0:
        return math.nan, 0.0
    mean = math.fsum(values.tolist()) / count
    if count < 2 or not math.isfinite(mean):  # noqa: PLR2004
        return mean, 0.0
    variance = math.fsum(((values - mean) ** 2).tolist()) / (count - 1)
    return mean, math.sqrt(variance / count)


def top_share(samples: ArrayLike, fraction: float) -> float:
    """Share of the total contributed by the largest ``fraction`` of nonnegative samples."""
    values = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if values.size == 0:
        return 0.0
    total = math.fsum(values.tolist())
    if total <= 0:
        return 0.0
    if not math.isfinite(total):
        return 1.0
    top = max(1, math.ceil(fraction * values.size))
    return math.fsum(values[-top:].tolist()) / total


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log(values) against time."""

    slope: float
    intercept: float
    stderr: float
    points: int


def fit_log_rate(times: ArrayLike, values: ArrayLike, *, start: float = -math.inf) -> RateFit | None:
    """
    Fit log(values) = intercept + slope * t over points with t >= start and values > 0.

    Returns:
        The fit, or None with fewer than two usable points

    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    usable = (t >= start - 1e-12) & np.isfinite(v) & (v > 0)
    if np.count_nonzero(usable) < 2:  # noqa: PLR2004
        return None
    result = stats.linregress(t[usable], np.log(v[usable]))
    stderr = float(result.stderr) if math.isfinite(result.stderr) else 0.0
    return RateFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        stderr=stderr,
        points=int(np.count_nonzero(usable)),
    )


def decreasing_trend(times: ArrayLike, values: ArrayLike) -> tuple[float, float]:
    """
    Spearman rank correlation of values against time and its one-sided p-value.

    Returns:
        Tuple (rho, p) with p for the alternative "values decrease"; (nan, 1) when undefined

    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(v)
    if np.count_nonzero(finite) < 3 or np.ptp(v[finite]) == 0:  # noqa: PLR2004
        return math.nan, 1.0
    result = stats.spearmanr(t[finite], v[finite], alternative="less")
    return float(result.statistic), float(result.pvalue)
