"""Explicit Euler integration of the neutral FSDE.

The neutral term is removed through d(L X_t)/dt = kappa (X(t) - X(t - r0)), which turns
the equation into the distributed-delay form

    dX = [-kappa (X(t) - X(t - r0)) + Z(X(t)) + b(X_t)] dt + sigma dW.

States are stored on the grid t_k = k h, k = -m..K; array index i corresponds to k = i - m.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray

from lib.errors import DimensionMismatchError, GridMismatchError, NonFiniteStateError
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.segment import GRID_TOLERANCE, Segment, grid_steps, trapezoid_window
from lib.simulate.noise import NoisePath

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]


def windows_of(states: FloatArray, m: int) -> FloatArray:
    """All sliding windows of a path block (..., m+1+K, n) as (..., K+1, m+1, n)."""
    return np.swapaxes(sliding_window_view(states, m + 1, axis=-2), -1, -2)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Realized path on [-r0, T].

    Attributes:
        states: X(t_k) for k = -m..K, shape (m+1+K, n)
        h: Grid step
        m: Delay steps (r0 = m h)
        gamma: Optional Gamma(t_k) = X(t_k) + L X_{t_k} for k = 0..K

    """

    states: FloatArray
    h: float
    m: int
    gamma: FloatArray | None = None

    @property
    def steps(self) -> int:
        return self.states.shape[0] - self.m - 1

    @property
    def horizon(self) -> float:
        return self.steps * self.h

    @property
    def times(self) -> FloatArray:
        return (np.arange(self.states.shape[0]) - self.m) * self.h

    def index_of(self, t: float) -> int:
        """Step index k of a grid time t in [0, T]."""
        k = grid_steps(t, self.h)
        if k > self.steps:
            raise GridMismatchError(f"time {t} is beyond the horizon {self.horizon}")
        return k

    def window(self, k: int) -> FloatArray:
        """Window values of the segment X_{t_k}, shape (m+1, n)."""
        return self.states[k : k + self.m + 1]

    def segment_at(self, t: float) -> Segment:
        """Segment X_t for a grid time t >= 0."""
        return Segment(self.window(self.index_of(t)), self.h)

    def segment_norms(self) -> FloatArray:
        """Grid sup-norm of every segment X_{t_k}, k = 0..K."""
        return np.max(np.linalg.norm(windows_of(self.states, self.m), axis=-1), axis=-1)


def integrate_batch(
    spec: ModelSpec, initial: FloatArray, increments: FloatArray, h: float
) -> FloatArray:
    """
    Integrate a batch of trials.

    Args:
        spec: Model
        initial: Initial windows (B, m+1, n)
        increments: Brownian increments (B, K, n)
        h: Grid step

    Returns:
        States (B, m+1+K, n)

    Raises:
        NonFiniteStateError: With the first step at which some trial blew up

    """
    batch, window_size, dim = initial.shape
    m = window_size - 1
    steps = increments.shape[1]
    states = np.empty((batch, window_size + steps, dim))
    states[:, :window_size] = initial
    diffusion = increments @ spec.sigma.T
    for k in range(steps):
        present = m + k
        drift = spec.drift(states[:, k : present + 1], h)
        states[:, present + 1] = states[:, present] + h * drift + diffusion[:, k]
        finite = np.isfinite(states[:, present + 1]).all(axis=-1)
        if not finite.all():
            raise NonFiniteStateError(step=k + 1, trials=np.flatnonzero(~finite).tolist())
    return states


def gamma_of(states: FloatArray, kappa: float, m: int, h: float) -> FloatArray:
    """Gamma(t_k) = X(t_k) + L X_{t_k} for every k >= 0 of a path block."""
    windows = windows_of(states, m)
    return windows[..., -1, :] + kappa * trapezoid_window(windows, h)


def check_inputs(spec: ModelSpec, initial: Segment, horizon: float, noise_h: float) -> int:
    """
    Validate grid and dimension compatibility and return the number of steps.

    Raises:
        GridMismatchError: On a step, delay or horizon mismatch
        DimensionMismatchError: On a dimension mismatch

    """
    spec.check_segment(initial)
    if abs(noise_h - initial.h) > GRID_TOLERANCE * initial.h:
        raise GridMismatchError(f"noise step {noise_h} differs from the grid step {initial.h}")
    return grid_steps(horizon, initial.h)


def integrate(
    spec: ModelSpec,
    initial: Segment,
    horizon: float,
    noise: NoisePath,
    *,
    with_gamma: bool = False,
) -> Trajectory:
    """
    Integrate one trial from ``initial`` up to ``horizon``.

    Args:
        spec: Model
        initial: Initial segment on the simulation grid
        horizon: Final time, a multiple of the grid step
        noise: Driving increments (at least horizon / h of them)
        with_gamma: Also record Gamma(t) = X(t) + L X_t

    Returns:
        Trajectory on [-r0, horizon]

    """
    steps = check_inputs(spec, initial, horizon, noise.h)
    if noise.dim != spec.dim:
        raise DimensionMismatchError(spec.dim, noise.dim, what="noise")
    if noise.steps < steps:
        raise GridMismatchError(f"noise has {noise.steps} increments, {steps} are needed")
    states = integrate_batch(
        spec, initial.values[np.newaxis], noise.increments[np.newaxis, :steps], initial.h
    )[0]
    logger.debug(f"Integrated {steps} steps of '{spec.name}' with h={initial.h}")
    gamma = gamma_of(states, spec.kappa, initial.m, initial.h) if with_gamma else None
    return Trajectory(states=states, h=initial.h, m=initial.m, gamma=gamma)


def gamma_consistency(traj: Trajectory, spec: ModelSpec, noise: NoisePath) -> float:
    """
    Max defect of Gamma(t_k) = Gamma(0) + sum h [Z(X) + b(X_.)] + sigma sum dW.

    The defect is of order h uniformly on [0, T].
    """
    steps = traj.steps
    if steps == 0:
        return 0.0
    windows = windows_of(traj.states, traj.m)
    gamma = windows[:, -1, :] + spec.kappa * trapezoid_window(windows, traj.h)
    drift = spec.drift_z(windows[:steps, -1, :]) + spec.drift_b(windows[:steps], traj.h)
    predicted = (
        gamma[0]
        + traj.h * np.cumsum(drift, axis=0)
        + np.cumsum(noise.increments[:steps] @ spec.sigma.T, axis=0)
    )
    return float(np.max(np.linalg.norm(gamma[1:] - predicted, axis=-1)))
