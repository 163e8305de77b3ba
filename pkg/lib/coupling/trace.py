"""Coupling by change of measure.

X starts from xi and solves the model. Y starts from eta, uses the neutral part and the
delay drift of X, and is pushed towards X by the schedule g until the paths coalesce:

    dY = [-kappa (X(s) - X(s - r0)) + Z(Y(s)) + b(X_s) + u(s)] ds + sigma dW(s).

On the grid the control is u_k = g(t_k) (X - Y) / |X - Y|, except on a step where the gap
left by an uncontrolled step is within reach (|v| <= h g(t_k)) and on the last step before
t, where u_k = v / h lands Y exactly on X. From the coupling time on Y is pinned to X.

The drift correction h_k = h1 or h2 (neutral part) plus h3 (control and delay part) makes

    sigma dW~_k = sigma dW_k + h h_k

drive Y as a solution started from eta, so the Girsanov density of h is exact on the grid.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.coupling.schedule import CouplingSchedule
from lib.errors import (
    DimensionMismatchError,
    GridMismatchError,
    InvalidParameterError,
    NonFiniteStateError,
)
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.segment import GRID_TOLERANCE, Segment, grid_steps, trapezoid_window
from lib.simulate.integrator import Trajectory, integrate_batch, windows_of
from lib.simulate.noise import NoisePath

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

TOLERANCE_SCALE = 1e-8


def default_tolerance(gaps: ArrayLike) -> FloatArray:
    """Coalescence threshold 1e-8 (1 + |xi(0) - eta(0)|)."""
    return TOLERANCE_SCALE * (1.0 + np.asarray(gaps, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class CouplingBatch:
    """
    Coupled paths of a batch of trials on [-r0, t + r0].

    Attributes:
        x_states: X on the grid, shape (B, m+1+N, n) with N = (t + r0) / h
        y_states: Y on the same grid
        tau_steps: Coupling step index per trial, -1 when the paths never met
        control: Applied control u_k, shape (B, N, n)
        h1: Neutral correction on [0, r0]
        h2: Neutral correction on (r0, t + r0]
        h3: Control and delay-drift correction
        increments: Driving increments, shape (B, N, n)
        h: Grid step
        m: Delay steps
        coupling_steps: Steps of the coupling horizon t
        kappa: Neutral weight
        gaps: Initial gaps |xi(0) - eta(0)|

    """

    x_states: FloatArray
    y_states: FloatArray
    tau_steps: NDArray[np.int64]
    control: FloatArray
    h1: FloatArray
    h2: FloatArray
    h3: FloatArray
    increments: FloatArray
    h: float
    m: int
    coupling_steps: int
    kappa: float
    gaps: FloatArray

    @property
    def drift_correction(self) -> FloatArray:
        """h_k = h1 + h2 + h3 at the left endpoints t_k, k = 0..N-1."""
        return self.h1 + self.h2 + self.h3

    @property
    def final_windows(self) -> FloatArray:
        """X_{t+r0}, which equals Y_{t+r0} for every coupled trial."""
        return self.x_states[:, -(self.m + 1) :]


def _control(
    gap: FloatArray, reach_gap: FloatArray, g_values: FloatArray, h: float, *, last: bool
) -> tuple[FloatArray, NDArray[np.bool_]]:
    """Control u_k and the mask of trials that land on this step."""
    distance = np.linalg.norm(gap, axis=-1)
    reach = np.linalg.norm(reach_gap, axis=-1)
    land = (reach <= h * g_values) | last
    direction = np.divide(
        gap, distance[:, np.newaxis], out=np.zeros_like(gap), where=distance[:, np.newaxis] > 0
    )
    control = np.where(land[:, np.newaxis], reach_gap / h, g_values[:, np.newaxis] * direction)
    return control, land


def run_coupling_batch(  # noqa: PLR0913, PLR0915
    spec: ModelSpec,
    xi: FloatArray,
    eta: FloatArray,
    t: float,
    increments: FloatArray,
    h: float,
    *,
    tol: float | None = None,
) -> CouplingBatch:
    """
    Couple a batch of trials.

    Args:
        spec: Model
        xi: Initial windows of X, shape (B, m+1, n)
        eta: Initial windows of Y, shape (B, m+1, n)
        t: Coupling horizon (a positive multiple of h)
        increments: Shared driving increments, at least (t + r0) / h of them per trial
        h: Grid step
        tol: Coalescence threshold; default 1e-8 (1 + gap) per trial

    Returns:
        CouplingBatch on [-r0, t + r0]

    """
    batch, window_size, dim = xi.shape
    m = window_size - 1
    coupling_steps = grid_steps(t, h)
    if coupling_steps < 1:
        raise InvalidParameterError(f"coupling horizon must be at least one step, got {t}")
    steps = coupling_steps + m
    if increments.shape[1] < steps:
        raise GridMismatchError(f"{steps} increments are needed, got {increments.shape[1]}")
    if tol is not None and not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    increments = increments[:, :steps]

    x = integrate_batch(spec, xi, increments, h)
    y = np.empty_like(x)
    y[:, :window_size] = eta
    gaps = np.linalg.norm(xi[:, -1] - eta[:, -1], axis=-1)
    tolerance = default_tolerance(gaps) if tol is None else np.full(batch, tol)
    schedule = CouplingSchedule(kappa1=spec.kappa1, gap=1.0, t=t).g(np.arange(coupling_steps) * h)

    tau_steps = np.full(batch, -1, dtype=np.int64)
    coupled = gaps <= tolerance
    y[coupled, m] = x[coupled, m]
    tau_steps[coupled] = 0

    diffusion = increments @ spec.sigma.T
    control = np.zeros((batch, steps, dim))
    h3 = np.zeros((batch, steps, dim))
    for k in range(steps):
        present = m + k
        x_now, y_now = x[:, present], y[:, present]
        z_x, z_y = spec.drift_z(x_now), spec.drift_z(y_now)
        landed = np.zeros(batch, dtype=bool)
        if k < coupling_steps:
            u, landed = _control(
                x_now - y_now,
                x_now - y_now + h * (z_x - z_y),
                schedule[k] * gaps,
                h,
                last=k == coupling_steps - 1,
            )
            u[coupled] = 0.0
            control[:, k] = u
        b_x = spec.drift_b(x[:, k : present + 1], h)
        shared = -spec.kappa * (x_now - x[:, k]) + b_x
        y[:, present + 1] = y_now + h * (shared + z_y + control[:, k]) + diffusion[:, k]
        h3[:, k] = control[:, k] + b_x - spec.drift_b(y[:, k : present + 1], h)

        met = ~coupled & (
            landed | (np.linalg.norm(x[:, present + 1] - y[:, present + 1], axis=-1) <= tolerance)
        )
        tau_steps[met] = k + 1
        coupled |= met
        y[coupled, present + 1] = x[coupled, present + 1]
        finite = np.isfinite(y[:, present + 1]).all(axis=-1)
        if not finite.all():
            raise NonFiniteStateError(step=k + 1, trials=np.flatnonzero(~finite).tolist())

    h1, h2 = _neutral_corrections(spec.kappa, x, y, steps, m)
    return CouplingBatch(
        x_states=x,
        y_states=y,
        tau_steps=tau_steps,
        control=control,
        h1=h1,
        h2=h2,
        h3=h3,
        increments=increments,
        h=h,
        m=m,
        coupling_steps=coupling_steps,
        kappa=spec.kappa,
        gaps=gaps,
    )


def _neutral_corrections(
    kappa: float, x: FloatArray, y: FloatArray, steps: int, m: int
) -> tuple[FloatArray, FloatArray]:
    """
    kappa [(Y - X)(t_k) - (Y - X)(t_k - r0)], split at r0.

    On [0, r0] (h1) the lagged gap is the initial gap xi - eta; beyond r0 (h2) it is the
    integral of Z(Y) - Z(X) + u over [t_k - r0, t_k] carried by the path itself.
    """
    difference = y - x
    full = kappa * (difference[:, m : m + steps] - difference[:, :steps])
    early = min(steps, m + 1)
    h1 = np.zeros_like(full)
    h2 = np.zeros_like(full)
    h1[:, :early] = full[:, :early]
    h2[:, early:] = full[:, early:]
    return h1, h2


@dataclass(frozen=True, eq=False)
class CouplingTrace:
    """
    One coupled run on [-r0, t + r0].

    ``tau`` is the coupling time (inf when the paths never met); ``g_values`` and
    ``envelope`` are g(t_k) and G(t_k) for k = 0..t/h. ``log_density`` and ``density``
    are None when sigma is singular.
    """

    x_traj: Trajectory
    y_traj: Trajectory
    tau: float
    t: float
    tol: float
    kappa: float
    g_values: FloatArray
    envelope: FloatArray
    control: FloatArray
    h1: FloatArray
    h2: FloatArray
    h3: FloatArray
    log_density: float | None
    density: float | None

    @property
    def h(self) -> float:
        return self.x_traj.h

    @property
    def h_values(self) -> FloatArray:
        return self.h1 + self.h2 + self.h3

    @property
    def gap(self) -> FloatArray:
        """|X(t_k) - Y(t_k)| for k = -m..(t + r0)/h."""
        return np.linalg.norm(self.x_traj.states - self.y_traj.states, axis=-1)


def run_coupling(  # noqa: PLR0913
    spec: ModelSpec,
    xi: Segment,
    eta: Segment,
    t: float,
    noise: NoisePath,
    tol: float | None = None,
) -> CouplingTrace:
    """
    Run the coupling for one trial.

    Args:
        spec: Model (sigma may be singular; the density is then omitted)
        xi: Initial segment of X
        eta: Initial segment of Y
        t: Coupling horizon
        noise: Shared driving noise covering [0, t + r0]
        tol: Coalescence threshold (default 1e-8 (1 + |xi(0) - eta(0)|))

    Returns:
        CouplingTrace

    """
    spec.check_segment(xi)
    if noise.dim != spec.dim:
        raise DimensionMismatchError(spec.dim, noise.dim, what="noise")
    if not xi.same_grid(eta):
        raise GridMismatchError("xi and eta live on different grids")
    if abs(noise.h - xi.h) > GRID_TOLERANCE * xi.h:
        raise GridMismatchError(f"noise step {noise.h} differs from the grid step {xi.h}")
    batch = run_coupling_batch(
        spec,
        xi.values[np.newaxis],
        eta.values[np.newaxis],
        t,
        noise.increments[np.newaxis],
        xi.h,
        tol=tol,
    )
    from lib.coupling.girsanov import log_density_batch, safe_exp  # noqa: PLC0415

    log_density: float | None = None
    density: float | None = None
    if not spec.is_singular:
        log_density = float(log_density_batch(spec, batch.drift_correction, batch.increments, xi.h)[0])
        density = float(safe_exp(np.asarray(log_density)))
    schedule = CouplingSchedule(kappa1=spec.kappa1, gap=float(batch.gaps[0]), t=t)
    grid = np.arange(batch.coupling_steps + 1) * xi.h
    tau_step = int(batch.tau_steps[0])
    trace = CouplingTrace(
        x_traj=Trajectory(states=batch.x_states[0], h=xi.h, m=xi.m),
        y_traj=Trajectory(states=batch.y_states[0], h=xi.h, m=xi.m),
        tau=tau_step * xi.h if tau_step >= 0 else math.inf,
        t=t,
        tol=float(default_tolerance(batch.gaps)[0]) if tol is None else tol,
        kappa=spec.kappa,
        g_values=schedule.g(grid),
        envelope=schedule.envelope(grid),
        control=batch.control[0],
        h1=batch.h1[0],
        h2=batch.h2[0],
        h3=batch.h3[0],
        log_density=log_density,
        density=density,
    )
    logger.debug(f"Coupling of '{spec.name}' met at tau={trace.tau} (t={t})")
    return trace


def neutral_identity_check(trace: CouplingTrace) -> float:
    """
    Max defect of d L(Y_s - X_s) = (h1 + h2) ds on the grid.

    Compares [L(Y - X)_{t_{k+1}} - L(Y - X)_{t_k}] / h with h1_k + h2_k; the defect is
    of order h.
    """
    difference = trace.y_traj.states - trace.x_traj.states
    neutral = trace.kappa * trapezoid_window(windows_of(difference, trace.x_traj.m), trace.h)
    rate = np.diff(neutral, axis=0) / trace.h
    predicted = trace.h1 + trace.h2
    if predicted.shape[0] == 0:
        return 0.0
    return float(np.max(np.linalg.norm(rate - predicted, axis=-1)))
