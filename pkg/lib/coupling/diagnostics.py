"""Monte Carlo diagnostics of the coupling density: its mean and its Novikov exponent."""

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from lib.coupling.girsanov import log_density_batch, quadratic_variation, safe_exp
from lib.coupling.trace import CouplingBatch, run_coupling_batch
from lib.errors import GridMismatchError, InvalidParameterError
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.montecarlo import EstimateReport, MonteCarloOptions, mean_se, run_trials_concat, top_share
from lib.montecarlo.sampling import IndexArray
from lib.segment import Segment, grid_steps
from lib.simulate.noise import noise_block

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

TOP_DECILE = 0.1


def coupled_samples(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    t: float,
    trials: int,
    reduce: Callable[[CouplingBatch], FloatArray],
    *,
    seed: int,
    options: MonteCarloOptions,
) -> FloatArray:
    """
    Run coupled trials chunk by chunk and keep ``reduce(batch)`` of every chunk.

    Trial i is driven by stream i of ``seed``.
    """
    spec.check_segment(xi)
    if not xi.same_grid(eta):
        raise GridMismatchError("xi and eta live on different grids")
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    h = xi.h
    steps = grid_steps(t, h) + xi.m

    def simulate_chunk(ids: IndexArray) -> FloatArray:
        increments = noise_block(seed, ids, steps, h, spec.dim)
        return reduce(
            run_coupling_batch(spec, xi.stacked(len(ids)), eta.stacked(len(ids)), t, increments, h)
        )

    return run_trials_concat(simulate_chunk, trials, options)


def density_mean_check(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    t: float,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Check that the sample mean of the density R is 1 within the SE multiplier.

    Raises:
        SingularDiffusionError: If sigma is singular

    """
    options = options or MonteCarloOptions()
    spec.sigma_inverse()
    log_density = coupled_samples(
        spec,
        xi,
        eta,
        t,
        trials,
        lambda batch: log_density_batch(spec, batch.drift_correction, batch.increments, batch.h),
        seed=seed,
        options=options,
    )
    estimate, std_error = mean_se(safe_exp(log_density))
    passed = abs(estimate - 1.0) <= options.thresholds.se_multiplier * std_error
    return EstimateReport(
        name="girsanov_mean",
        point_estimate=estimate,
        std_error=std_error,
        trials=trials,
        passed=passed,
        bound=1.0,
        metadata={
            "t": t,
            "mean_log_density": float(np.mean(log_density)),
            "max_log_density": float(np.max(log_density)),
            "overflow_rate": float(np.mean(log_density > options.thresholds.density_overflow)),
        },
    )


def novikov_diagnostic(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    t: float,
    trials: int,
    *,
    seed: int = 0,
    options: MonteCarloOptions | None = None,
) -> EstimateReport:
    """
    Estimate E exp(1/2 h sum |sigma^-1 h_k|^2) over coupled runs.

    ``passed`` is False when the top decile of the samples carries more than the
    configured divergence share of their sum, which suggests the expectation diverges.

    Args:
        spec: Model with invertible sigma
        xi: Initial segment of X
        eta: Initial segment of Y
        t: Coupling horizon
        trials: Number of coupled runs
        seed: Seed of the per-trial noise streams
        options: Execution settings

    Returns:
        EstimateReport

    Raises:
        SingularDiffusionError: If sigma is singular

    """
    options = options or MonteCarloOptions()
    sigma_inv = spec.sigma_inverse()
    exponents = coupled_samples(
        spec,
        xi,
        eta,
        t,
        trials,
        lambda batch: quadratic_variation(batch.drift_correction, batch.h, sigma_inv),
        seed=seed,
        options=options,
    )
    samples = safe_exp(exponents)
    estimate, std_error = mean_se(samples)
    share = top_share(samples, TOP_DECILE)
    passed = bool(share <= options.thresholds.divergence_share or np.ptp(samples) == 0)
    if not passed:
        logger.warning(
            f"Novikov exponent of '{spec.name}' looks heavy-tailed (top decile share {share:.2f})"
        )
    return EstimateReport(
        name="novikov_diagnostic",
        point_estimate=estimate,
        std_error=std_error,
        trials=trials,
        passed=passed,
        bound=options.thresholds.divergence_share,
        metadata={
            "t": t,
            "top_decile_share": share,
            "max_exponent": float(np.max(exponents)),
            "mean_exponent": float(np.mean(exponents)),
            "log_mean": float(logsumexp(exponents) - np.log(exponents.size)),
        },
    )
