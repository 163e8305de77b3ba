"""Ergodicity checks: total variation decay, L2 decay, hypercontractivity and uniqueness.

The invariant law is approached through warmed-up chains; every report states the warm-up
it used.
"""

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.coupling.girsanov import log_density_batch, safe_exp
from lib.coupling.trace import run_coupling_batch
from lib.errors import InvalidParameterError
from lib.estimators.observables import Observable
from lib.estimators.paths import (
    certified_rate,
    check_pair,
    check_trials,
    rate_judgment,
    sample_windows,
    time_indices,
    windows_at,
)
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.montecarlo import (
    EstimateReport,
    MonteCarloOptions,
    decreasing_trend,
    fit_log_rate,
    mean_se,
    run_trials_concat,
)
from lib.montecarlo.sampling import IndexArray
from lib.segment import Segment, grid_steps, sup_norm
from lib.simulate.noise import derive_seed, noise_block

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

BOOTSTRAP_RESAMPLES = 200


def tv_decay(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    t_grid: ArrayLike,
    trials: int,
    *,
    coupling_horizon: float | None = None,
    burn_in: float = 0.0,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Upper bounds E|1 - R| on the total variation distance of the laws at t + r0.

    For each t the paths from xi and eta first run synchronously over [0, t - t_c] and are
    then coupled by change of measure over a horizon t_c = min(coupling_horizon, t)
    (default r0). Trials with log R above the overflow limit are excluded and counted.
    The rate fit uses the points with t >= burn_in; the check passes when the slope is
    at most -(1 - tolerance) lambda / 2. A Spearman trend test is reported alongside.

    Raises:
        SingularDiffusionError: If sigma is singular
        InvalidParameterError: If a time is not positive

    """
    options = options or MonteCarloOptions()
    check_pair(spec, xi, eta)
    check_trials(trials)
    spec.sigma_inverse()
    times = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    if np.any(times <= 0):
        raise InvalidParameterError("every t must be positive")
    h, m = xi.h, xi.m
    horizon = spec.r0 if coupling_horizon is None else coupling_horizon
    coupling = [min(horizon, float(t)) for t in times]
    coupling_steps = time_indices(coupling, h)
    sync_steps = [grid_steps(float(t), h) - k for t, k in zip(times, coupling_steps, strict=True)]
    total = max(s + k for s, k in zip(sync_steps, coupling_steps, strict=True)) + m
    overflow = options.thresholds.density_overflow

    def simulate_chunk(ids: IndexArray) -> FloatArray:
        increments = noise_block(seed, ids, total, h, spec.dim)
        indices = sorted(set(sync_steps))
        x = windows_at(spec, xi.stacked(len(ids)), increments, indices, h)
        y = windows_at(spec, eta.stacked(len(ids)), increments, indices, h)
        values = np.empty((len(ids), len(times)))
        for column, (start, t_c) in enumerate(zip(sync_steps, coupling, strict=True)):
            row = indices.index(start)
            batch = run_coupling_batch(
                spec, x[:, row].copy(), y[:, row].copy(), t_c, increments[:, start:], h
            )
            log_density = log_density_batch(spec, batch.drift_correction, batch.increments, h)
            bound = np.abs(1.0 - safe_exp(log_density))
            values[:, column] = np.where(log_density <= overflow, bound, np.nan)
        return values

    samples = run_trials_concat(simulate_chunk, trials, options)
    estimates: list[float] = []
    errors: list[float] = []
    for column in samples.T:
        estimate, std_error = mean_se(column[np.isfinite(column)])
        estimates.append(estimate)
        errors.append(std_error)
    excluded = int(np.count_nonzero(~np.isfinite(samples)))
    if excluded:
        logger.warning(f"Excluded {excluded} coupled runs with log R above the overflow limit")

    condition, rate = certified_rate(spec)
    required = None if rate is None else -(1.0 - options.thresholds.tv_tolerance) * rate / 2.0
    fit = fit_log_rate(times, estimates, start=burn_in)
    passed = rate_judgment(fit, required)
    if required is not None and not any(value > 0 for value in estimates):
        passed = True
    late = times >= burn_in
    rho, p_value = decreasing_trend(times[late], np.asarray(estimates)[late])
    return EstimateReport(
        name="tv_decay",
        point_estimate=estimates[-1],
        std_error=errors[-1],
        trials=trials,
        passed=passed,
        bound=required,
        metadata={
            "lambda": rate,
            "slope": fit.slope if fit else math.nan,
            "burn_in": burn_in,
            "coupling_horizon": horizon,
            "spearman_rho": rho,
            "spearman_p_value": p_value,
            "decreasing": p_value < options.thresholds.trend_p_value,
            "excluded": excluded,
            "exclusion_rate": excluded / samples.size,
        },
        curve={"time": times.tolist(), "estimate": estimates, "std_error": errors},
        condition=condition,
    )


def sample_invariant(  # noqa: PLR0913
    spec: ModelSpec,
    warmup: float,
    count: int,
    h: float,
    seed: int,
    start: Segment | None = None,
    *,
    options: MonteCarloOptions | None = None,
) -> FloatArray:
    """
    Empirical approximation of the invariant law by warmed-up segments.

    Args:
        spec: Model
        warmup: Run length of every chain
        count: Number of independent chains
        h: Grid step
        seed: Seed of the chain streams
        start: Initial segment (default identically zero)
        options: Execution settings

    Returns:
        Windows X_warmup, shape (count, m+1, n)

    """
    options = options or MonteCarloOptions()
    if warmup < 0:
        raise InvalidParameterError(f"warmup must be nonnegative, got {warmup}")
    initial = start
    if initial is None:
        initial = Segment.constant(np.zeros(spec.dim), spec.delay_steps(h), h)
    logger.debug(f"Sampling {count} chains of '{spec.name}' warmed up to {warmup}")
    return sample_windows(spec, initial, [warmup], count, seed=seed, options=options)[:, 0]


def _inner_moments(  # noqa: PLR0913
    spec: ModelSpec,
    f: Observable,
    outer: FloatArray,
    times: FloatArray,
    trials_inner: int,
    h: float,
    seed: int,
    options: MonteCarloOptions,
) -> tuple[FloatArray, FloatArray]:
    """Inner means and sample variances of f(X_t(outer_i)), each (outer, T)."""
    check_trials(trials_inner, "trials_inner")
    indices = time_indices(times, h)
    steps = max(indices)

    def simulate_chunk(ids: IndexArray) -> FloatArray:
        streams = (ids[:, np.newaxis] * trials_inner + np.arange(trials_inner)).ravel()
        increments = noise_block(seed, streams, steps, h, spec.dim)
        initial = np.repeat(outer[ids], trials_inner, axis=0)
        values = f(windows_at(spec, initial, increments, indices, h))
        values = values.reshape(len(ids), trials_inner, len(indices))
        variance = values.var(axis=1, ddof=1) if trials_inner > 1 else np.zeros_like(values[:, 0])
        return np.stack([values.mean(axis=1), variance], axis=-1)

    moments = run_trials_concat(simulate_chunk, outer.shape[0], options)
    return moments[..., 0], moments[..., 1]


def _corrected_variance(means: FloatArray, variances: FloatArray, trials_inner: int) -> float:
    """Variance of the inner means minus the mean inner-sampling variance, floored at 0."""
    if means.size < 2:  # noqa: PLR2004
        return 0.0
    spread = float(np.var(means, ddof=1))
    noise = math.fsum((variances / trials_inner).tolist()) / variances.size
    return max(spread - noise, 0.0)


def l2_decay(  # noqa: PLR0913
    spec: ModelSpec,
    f: Observable,
    t_grid: ArrayLike,
    warmup: float,
    trials_outer: int,
    trials_inner: int,
    *,
    h: float,
    start: Segment | None = None,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Var over the empirical invariant law of P_t f, for every t of the grid.

    Outer samples are warmed-up chains; P_t f at each is estimated from inner runs and the
    variance is corrected for inner sampling noise. Bootstrap over the outer samples gives
    the standard errors. Passes when the fitted log-slope over t > 0 is at most
    -(1 - tolerance) lambda.

    Raises:
        InvalidObservableError: If f is not declared bounded

    """
    options = options or MonteCarloOptions()
    f.require(bounded=True)
    check_trials(trials_outer, "trials_outer")
    times = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    outer = sample_invariant(spec, warmup, trials_outer, h, derive_seed(seed, 0), start, options=options)
    means, variances = _inner_moments(
        spec, f, outer, times, trials_inner, h, derive_seed(seed, 1), options
    )
    estimates = [
        _corrected_variance(means[:, j], variances[:, j], trials_inner) for j in range(times.size)
    ]
    rng = np.random.default_rng(derive_seed(seed, 2))
    resamples = rng.integers(0, trials_outer, size=(BOOTSTRAP_RESAMPLES, trials_outer))
    errors = [
        float(
            np.std(
                [_corrected_variance(means[r, j], variances[r, j], trials_inner) for r in resamples],
                ddof=1,
            )
        )
        for j in range(times.size)
    ]

    condition, rate = certified_rate(spec)
    required = None if rate is None else -(1.0 - options.thresholds.l2_tolerance) * rate
    fit = fit_log_rate(times, estimates, start=float(np.min(times[times > 0], initial=math.inf)))
    passed = rate_judgment(fit, required)
    if required is not None and not any(value > 0 for value in estimates):
        passed = True
    return EstimateReport(
        name="l2_decay",
        point_estimate=estimates[-1],
        std_error=errors[-1],
        trials=trials_outer * trials_inner,
        passed=passed,
        bound=required,
        metadata={
            "observable": f.name,
            "warmup": warmup,
            "trials_outer": trials_outer,
            "trials_inner": trials_inner,
            "lambda": rate,
            "slope": fit.slope if fit else math.nan,
        },
        curve={"time": times.tolist(), "variance": estimates, "std_error": errors},
        condition=condition,
    )


def hyper_check(  # noqa: PLR0913
    spec: ModelSpec,
    f: Observable,
    t: float,
    warmup: float,
    trials_outer: int,
    trials_inner: int,
    *,
    h: float,
    start: Segment | None = None,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Compare the 4-norm of P_t f with the 2-norm of f under the empirical invariant law.

    A necessary condition for ||P_t||_{2->4} <= 1 on this one f, not a proof of the
    operator bound. Passes when the 4-norm is at most the 2-norm plus the SE multiplier
    of the combined delta-method standard error.
    """
    options = options or MonteCarloOptions()
    f.require(bounded=True)
    check_trials(trials_outer, "trials_outer")
    outer = sample_invariant(spec, warmup, trials_outer, h, derive_seed(seed, 0), start, options=options)
    means, _ = _inner_moments(
        spec, f, outer, np.array([t]), trials_inner, h, derive_seed(seed, 1), options
    )
    fourth, fourth_se = mean_se(means[:, 0] ** 4)
    second, second_se = mean_se(f(outer) ** 2)
    four_norm = fourth**0.25
    two_norm = math.sqrt(second)
    four_se = 0.25 * fourth**-0.75 * fourth_se if fourth > 0 else 0.0
    two_se = 0.5 * second_se / two_norm if two_norm > 0 else 0.0
    combined = math.hypot(four_se, two_se)
    passed = four_norm <= two_norm + options.thresholds.se_multiplier * combined
    return EstimateReport(
        name="hyper_check",
        point_estimate=four_norm,
        std_error=four_se,
        trials=trials_outer * trials_inner,
        passed=passed,
        bound=two_norm,
        metadata={
            "t": t,
            "observable": f.name,
            "warmup": warmup,
            "two_norm_std_error": two_se,
        },
    )


def invariant_agreement(  # noqa: PLR0913
    spec: ModelSpec,
    f: Observable,
    xi: Segment,
    eta: Segment,
    t: float,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Uniqueness of the invariant law seen through f.

    Chains from xi and from eta run to t on independent streams; the check passes when
    the difference of the means of f is within the SE multiplier of the combined standard
    error. The synchronous bound E[1 ∧ ||X_t(xi) - X_t(eta)||_inf] on the Wasserstein
    distance is reported alongside.
    """
    options = options or MonteCarloOptions()
    f.require(bounded=True)
    check_pair(spec, xi, eta)
    check_trials(trials)
    from_xi = sample_windows(spec, xi, [t], trials, seed=derive_seed(seed, 0), options=options)[:, 0]
    from_eta = sample_windows(spec, eta, [t], trials, seed=derive_seed(seed, 1), options=options)[:, 0]
    synchronous = sample_windows(spec, eta, [t], trials, seed=derive_seed(seed, 0), options=options)[:, 0]
    mean_xi, se_xi = mean_se(f(from_xi))
    mean_eta, se_eta = mean_se(f(from_eta))
    difference = mean_xi - mean_eta
    combined = math.hypot(se_xi, se_eta)
    distance, distance_se = mean_se(np.minimum(1.0, sup_norm(from_xi - synchronous)))
    return EstimateReport(
        name="invariant_agreement",
        point_estimate=difference,
        std_error=combined,
        trials=trials,
        passed=abs(difference) <= options.thresholds.se_multiplier * combined,
        bound=options.thresholds.se_multiplier * combined,
        metadata={
            "t": t,
            "observable": f.name,
            "mean_xi": mean_xi,
            "mean_eta": mean_eta,
            "wasserstein_bound": distance,
            "wasserstein_bound_std_error": distance_se,
        },
    )
