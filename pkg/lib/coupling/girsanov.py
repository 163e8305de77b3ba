"""Girsanov density of the coupling drift correction."""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from lib.coupling.trace import CouplingTrace
from lib.errors import GridMismatchError
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.simulate.noise import NoisePath

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

EXP_OVERFLOW = 709.0


def log_density_from_drift(
    drift: FloatArray, increments: FloatArray, h: float, sigma_inv: FloatArray
) -> FloatArray:
    """
    log R = -sum <sigma^-1 h_k, dW_k> - 1/2 h sum |sigma^-1 h_k|^2.

    Args:
        drift: Drift corrections h_k, shape (..., N, n)
        increments: Driving increments dW_k, same shape
        h: Grid step
        sigma_inv: Inverse diffusion matrix

    Returns:
        log R per leading index

    """
    scaled = drift @ sigma_inv.T
    leading = scaled.shape[:-2]
    flat_scaled = scaled.reshape(*leading, -1)
    flat_increments = increments.reshape(*leading, -1)
    stochastic = np.sum(flat_scaled * flat_increments, axis=-1)
    quadratic = 0.5 * h * np.sum(flat_scaled**2, axis=-1)
    return -stochastic - quadratic


def quadratic_variation(drift: FloatArray, h: float, sigma_inv: FloatArray) -> FloatArray:
    """1/2 h sum |sigma^-1 h_k|^2 per leading index."""
    scaled = drift @ sigma_inv.T
    return 0.5 * h * np.sum(scaled.reshape(*scaled.shape[:-2], -1) ** 2, axis=-1)


def log_density_batch(
    spec: ModelSpec, drift: FloatArray, increments: FloatArray, h: float
) -> FloatArray:
    """
    log R for a batch of coupled trials.

    Raises:
        SingularDiffusionError: If sigma is singular

    """
    return log_density_from_drift(drift, increments[..., : drift.shape[-2], :], h, spec.sigma_inverse())


def safe_exp(values: FloatArray) -> FloatArray:
    """exp(values) with inf above the float64 range and no overflow warnings."""
    with np.errstate(over="ignore"):
        return np.where(values < EXP_OVERFLOW, np.exp(np.minimum(values, EXP_OVERFLOW)), np.inf)


@dataclass(frozen=True)
class DensityResult:
    """Density R of one coupled run; ``density`` is inf when exp overflows."""

    log_density: float
    density: float
    quadratic: float

    @property
    def overflowed(self) -> bool:
        return not math.isfinite(self.density)


def girsanov_density(trace: CouplingTrace, spec: ModelSpec, noise: NoisePath) -> DensityResult:
    """
    Density R of the drift correction of a coupled run.

    Args:
        trace: Output of run_coupling with the same noise
        spec: Model of the run
        noise: Noise the run was driven by

    Returns:
        DensityResult

    Raises:
        SingularDiffusionError: If sigma is singular
        GridMismatchError: If the noise does not cover the coupled run

    """
    sigma_inv = spec.sigma_inverse()
    steps = trace.h_values.shape[0]
    if noise.steps < steps:
        raise GridMismatchError(f"noise has {noise.steps} increments, {steps} are needed")
    increments = noise.increments[:steps]
    log_density = float(log_density_from_drift(trace.h_values, increments, trace.h, sigma_inv))
    quadratic = float(quadratic_variation(trace.h_values, trace.h, sigma_inv))
    density = float(safe_exp(np.asarray(log_density)))
    if not math.isfinite(density):
        logger.warning(f"Density overflow for '{spec.name}' (log R = {log_density:.1f})")
    return DensityResult(log_density=log_density, density=density, quadratic=quadratic)
