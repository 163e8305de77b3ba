"""Law identity under the coupling density.

Y is a solution started from eta under R dP and coalesces with X(xi) by t, so
E[R phi(X_{t+r0}(xi))] = E[phi(X_{t+r0}(eta))]. The right side is simulated from eta on
the same noise and the decision uses the paired difference.
"""

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from lib.coupling.girsanov import log_density_batch
from lib.coupling.trace import run_coupling_batch
from lib.estimators.observables import Observable
from lib.estimators.paths import check_pair, check_trials
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.montecarlo import EstimateReport, MonteCarloOptions, mean_se, run_trials
from lib.montecarlo.sampling import IndexArray
from lib.segment import Segment, grid_steps
from lib.simulate.integrator import integrate_batch
from lib.simulate.noise import noise_block

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]


def reweighted_law_check(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    t: float,
    observables: Sequence[Observable],
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> list[EstimateReport]:
    """
    Compare E[R phi(X_{t+r0}(xi))] with E[phi(X_{t+r0}(eta))] for each observable.

    Trials with log R above the overflow limit are excluded and counted. Each report
    passes when the mean paired difference is within the SE multiplier of its standard
    error; ``passed`` is None when every trial was excluded.

    Returns:
        One EstimateReport per observable, point_estimate = reweighted mean

    Raises:
        SingularDiffusionError: If sigma is singular
        InvalidObservableError: If an observable is not declared bounded

    """
    options = options or MonteCarloOptions()
    for observable in observables:
        observable.require(bounded=True)
    check_pair(spec, xi, eta)
    check_trials(trials)
    spec.sigma_inverse()
    h, m = xi.h, xi.m
    steps = grid_steps(t, h) + m

    def simulate_chunk(ids: IndexArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        increments = noise_block(seed, ids, steps, h, spec.dim)
        batch = run_coupling_batch(spec, xi.stacked(len(ids)), eta.stacked(len(ids)), t, increments, h)
        log_density = log_density_batch(spec, batch.drift_correction, batch.increments, h)
        plain = integrate_batch(spec, eta.stacked(len(ids)), increments, h)[:, -(m + 1) :]
        return log_density, batch.final_windows, plain

    chunks = run_trials(simulate_chunk, trials, options)
    log_density = np.concatenate([chunk[0] for chunk in chunks])
    coupled = np.concatenate([chunk[1] for chunk in chunks])
    plain = np.concatenate([chunk[2] for chunk in chunks])

    kept = log_density <= options.thresholds.density_overflow
    excluded = int(np.count_nonzero(~kept))
    if excluded:
        logger.warning(f"Excluded {excluded}/{trials} trials with log R above the overflow limit")
    density = np.exp(log_density[kept])
    density_mean, density_se = mean_se(density)

    reports: list[EstimateReport] = []
    for observable in observables:
        weighted = density * observable(coupled[kept])
        target = observable(plain[kept])
        reweighted_mean, reweighted_se = mean_se(weighted)
        plain_mean, plain_se = mean_se(target)
        difference, difference_se = mean_se(weighted - target)
        passed: bool | None = None
        if kept.any():
            passed = bool(abs(difference) <= options.thresholds.se_multiplier * difference_se)
        reports.append(
            EstimateReport(
                name=f"reweighted_law_check[{observable.name}]",
                point_estimate=reweighted_mean,
                std_error=reweighted_se,
                trials=int(np.count_nonzero(kept)),
                passed=passed,
                bound=plain_mean,
                metadata={
                    "t": t,
                    "observable": observable.name,
                    "plain_mean": plain_mean,
                    "plain_std_error": plain_se,
                    "unweighted_mean": mean_se(observable(coupled))[0],
                    "difference": difference,
                    "difference_std_error": difference_se,
                    "density_mean": density_mean,
                    "density_std_error": density_se,
                    "excluded": excluded,
                    "exclusion_rate": excluded / trials,
                },
            )
        )
    return reports
