"""Synchronous-coupling contraction curve ||X_t(xi) - X_t(eta)||^2."""

import math

import numpy as np

from lib.errors import GridMismatchError
from lib.estimators.paths import certified_rate, check_pair, rate_judgment
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.montecarlo import EstimateReport, MonteCarloOptions, fit_log_rate
from lib.segment import GRID_TOLERANCE, Segment, grid_steps, sup_norm
from lib.simulate.integrator import integrate_batch, windows_of
from lib.simulate.noise import NoisePath

logger = get_logger(__name__)


def contraction_curve(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    horizon: float,
    noise: NoisePath,
    *,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Squared uniform distance of the segments driven by the same noise, and its rate.

    The log of the curve is fitted over [r0, horizon]; the check passes when the slope is
    at most -(1 - tolerance) lambda. ``point_estimate`` is the fitted slope.

    Args:
        spec: Model
        xi: First initial segment
        eta: Second initial segment
        horizon: Final time
        noise: Shared driving noise (the curve does not depend on it up to round-off)
        options: Thresholds

    Returns:
        EstimateReport with the curve (time, squared_distance)

    """
    options = options or MonteCarloOptions()
    check_pair(spec, xi, eta)
    h, m = xi.h, xi.m
    steps = grid_steps(horizon, h)
    if noise.steps < steps or abs(noise.h - h) > GRID_TOLERANCE * h:
        raise GridMismatchError(f"noise does not cover [0, {horizon}] with step {h}")
    increments = noise.increments[np.newaxis, :steps]
    x = integrate_batch(spec, xi.values[np.newaxis], increments, h)[0]
    y = integrate_batch(spec, eta.values[np.newaxis], increments, h)[0]
    distance = sup_norm(windows_of(x - y, m)) ** 2
    times = np.arange(steps + 1) * h

    condition, rate = certified_rate(spec)
    required = None if rate is None else -(1.0 - options.thresholds.contraction_tolerance) * rate
    fit = fit_log_rate(times, distance, start=spec.r0)
    passed = rate_judgment(fit, required)
    if required is not None and not np.any(distance > 0):
        passed = True
    logger.info(f"Contraction of '{spec.name}': slope={fit.slope if fit else math.nan:.4g}")
    return EstimateReport(
        name="contraction_curve",
        point_estimate=fit.slope if fit else math.nan,
        std_error=fit.stderr if fit else 0.0,
        trials=1,
        passed=passed,
        bound=required,
        metadata={
            "horizon": horizon,
            "h": h,
            "lambda": rate,
            "initial_distance": float(distance[0]),
            "final_distance": float(distance[-1]),
            "fit_points": fit.points if fit else 0,
        },
        curve={"time": times.tolist(), "squared_distance": distance.tolist()},
        condition=condition,
    )
