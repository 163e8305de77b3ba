"""Sampling falsification checks for the declared hypothesis constants."""

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict
from scipy.interpolate import interp1d

from lib.errors import InvalidParameterError
from lib.logging import get_logger
from lib.model.spec import ModelSpec
from lib.segment import sup_norm, trapezoid_window

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

RELATIVE_SLACK = 1e-9


class VerificationReport(BaseModel):
    """Outcome of a sampling verifier; worst_margin is the largest observed excess."""

    model_config = ConfigDict(frozen=True)

    check: str
    sample_count: int
    radius: float
    violations: int
    worst_margin: float


def sample_ball(
    rng: np.random.Generator, count: int, dim: int, radius: float, *, leading: tuple[int, ...] = ()
) -> FloatArray:
    """Uniform samples from the closed Euclidean ball of the given radius."""
    shape = (count, *leading)
    directions = rng.standard_normal((*shape, dim))
    norms = np.linalg.norm(directions, axis=-1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = radius * rng.uniform(0.0, 1.0, (*shape, 1)) ** (1.0 / dim)
    return directions / norms * radii


def sample_segments(
    rng: np.random.Generator, count: int, dim: int, radius: float, m: int, knots: int
) -> FloatArray:
    """Random piecewise-linear windows (count, m+1, dim) bounded by radius in sup-norm."""
    knot_values = sample_ball(rng, count, dim, radius, leading=(knots,))
    knot_positions = np.linspace(0.0, 1.0, knots)
    interpolator = interp1d(knot_positions, knot_values, axis=1)
    return np.asarray(interpolator(np.linspace(0.0, 1.0, m + 1)))


def _report(check: str, lhs: FloatArray, rhs: FloatArray, radius: float) -> VerificationReport:
    excess = lhs - rhs
    slack = RELATIVE_SLACK * (np.abs(lhs) + np.abs(rhs))
    violations = int(np.count_nonzero(excess > slack))
    if violations:
        logger.warning(f"{check}: {violations} violations out of {lhs.size} samples")
    return VerificationReport(
        check=check,
        sample_count=int(lhs.size),
        radius=radius,
        violations=violations,
        worst_margin=float(np.max(excess)),
    )


def _check_budget(sample_count: int, radius: float) -> None:
    if sample_count < 1:
        raise InvalidParameterError(f"sample_count must be >= 1, got {sample_count}")
    if not radius > 0:
        raise InvalidParameterError(f"radius must be positive, got {radius}")


def verify_dissipativity(
    spec: ModelSpec, sample_count: int, radius: float, *, seed: int = 0
) -> VerificationReport:
    """
    Check <Z(x) - Z(y), x - y> <= -kappa1 |x - y|^2 on pairs sampled from a ball.

    Args:
        spec: Model to check
        sample_count: Number of sampled pairs
        radius: Radius of the sampling ball
        seed: Sampling seed

    Returns:
        Violation count (relative slack 1e-9) and worst excess

    """
    _check_budget(sample_count, radius)
    rng = np.random.default_rng(seed)
    x = sample_ball(rng, sample_count, spec.dim, radius)
    y = sample_ball(rng, sample_count, spec.dim, radius)
    difference = x - y
    lhs = np.sum((spec.drift_z(x) - spec.drift_z(y)) * difference, axis=-1)
    rhs = -spec.kappa1 * np.sum(difference * difference, axis=-1)
    return _report("dissipativity", lhs, rhs, radius)


def verify_h2(  # noqa: PLR0913
    spec: ModelSpec,
    sample_count: int,
    radius: float,
    *,
    m: int = 20,
    knots: int = 4,
    seed: int = 0,
) -> VerificationReport:
    """
    Check the segment dissipativity hypothesis on sampled segment pairs.

    2 <Z(xi(0)) - Z(eta(0)) + b(xi) - b(eta), xi(0) - eta(0) + L(xi - eta)>
        <= lambda2 ||xi - eta||^2 - lambda1 |xi(0) - eta(0)|^2

    Segments are random piecewise-linear functions with ``knots`` knots on a grid of
    m steps over [-r0, 0], bounded by ``radius``.
    """
    _check_budget(sample_count, radius)
    if knots < 2:  # noqa: PLR2004
        raise InvalidParameterError(f"knots must be >= 2, got {knots}")
    h = spec.r0 / m
    rng = np.random.default_rng(seed)
    xi = sample_segments(rng, sample_count, spec.dim, radius, m, knots)
    eta = sample_segments(rng, sample_count, spec.dim, radius, m, knots)
    head_gap = xi[:, -1] - eta[:, -1]
    neutral_gap = spec.kappa * trapezoid_window(xi - eta, h)
    drift_gap = (
        spec.drift_z(xi[:, -1])
        - spec.drift_z(eta[:, -1])
        + spec.drift_b(xi, h)
        - spec.drift_b(eta, h)
    )
    lhs = 2.0 * np.sum(drift_gap * (head_gap + neutral_gap), axis=-1)
    rhs = spec.lambda2 * sup_norm(xi - eta) ** 2 - spec.lambda1 * np.sum(
        head_gap * head_gap, axis=-1
    )
    return _report("h2", lhs, rhs, radius)
