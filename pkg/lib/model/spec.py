"""Model declaration: coefficients, diffusion and hypothesis constants."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from lib.errors import (
    DimensionMismatchError,
    GridMismatchError,
    InvalidModelError,
    SingularDiffusionError,
)
from lib.segment import Segment, grid_steps

FloatArray = NDArray[np.float64]

# Z acts on states shaped (..., n) and returns (..., n).
DriftZ = Callable[[FloatArray], FloatArray]
# b acts on windows shaped (..., m+1, n) with grid step h and returns (..., n).
DriftB = Callable[[FloatArray, float], FloatArray]

SINGULAR_CONDITION = 1e12


def zero_delay_drift(window: FloatArray, h: float) -> FloatArray:  # noqa: ARG001
    """Delay drift b == 0."""
    return np.zeros(window.shape[:-2] + window.shape[-1:])


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    Neutral FSDE d{X(t) + L X_t} = {Z(X(t)) + b(X_t)} dt + sigma dW(t).

    Attributes:
        dim: State dimension n
        kappa: Neutral weight in [0, 1)
        r0: Delay length
        drift_z: Memoryless drift Z
        drift_b: Delay drift b
        sigma: n x n diffusion matrix
        L1: Lipschitz constant of Z
        L2: Lipschitz constant of b with respect to the uniform norm
        lambda1: Dissipativity constant multiplying |xi(0) - eta(0)|^2
        lambda2: Constant multiplying the segment distance
        kappa1: One-sided dissipativity constant of Z
        name: Registry name or "custom"
        parameters: Parameters the model was built from

    """

    dim: int
    kappa: float
    r0: float
    drift_z: DriftZ
    drift_b: DriftB
    sigma: FloatArray
    L1: float  # noqa: N815
    L2: float  # noqa: N815
    lambda1: float
    lambda2: float
    kappa1: float
    name: str = "custom"
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        sigma = np.array(self.sigma, dtype=np.float64)
        if sigma.ndim == 0:
            sigma = sigma * np.eye(self.dim)
        if sigma.shape != (self.dim, self.dim):
            raise DimensionMismatchError(self.dim, sigma.shape[0], what="sigma")
        if not np.all(np.isfinite(sigma)):
            raise InvalidModelError("sigma must be finite")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        self._validate_constants()

    def _validate_constants(self) -> None:
        if self.dim < 1:
            raise InvalidModelError(f"dim must be >= 1, got {self.dim}")
        if not 0.0 <= self.kappa < 1.0:
            raise InvalidModelError(f"kappa must lie in [0, 1), got {self.kappa}")
        if not self.r0 > 0:
            raise InvalidModelError(f"r0 must be positive, got {self.r0}")
        if min(self.L1, self.L2) < 0:
            raise InvalidModelError("Lipschitz constants must be nonnegative")
        if not self.lambda1 > self.lambda2 > 0:
            raise InvalidModelError(
                f"need lambda1 > lambda2 > 0, got lambda1={self.lambda1}, lambda2={self.lambda2}"
            )

    @property
    def sigma_condition(self) -> float:
        """Condition number of sigma; infinite when sigma is singular."""
        singular_values = np.linalg.svd(self.sigma, compute_uv=False)
        if singular_values[-1] <= 0:
            return math.inf
        return float(singular_values[0] / singular_values[-1])

    @property
    def is_singular(self) -> bool:
        return self.sigma_condition > SINGULAR_CONDITION

    def sigma_inverse(self) -> FloatArray:
        """
        Inverse of the diffusion matrix.

        Raises:
            SingularDiffusionError: If sigma is singular or badly conditioned

        """
        if self.is_singular:
            raise SingularDiffusionError(
                f"sigma is singular (condition number {self.sigma_condition:.3g})"
            )
        return np.linalg.inv(self.sigma)

    def delay_steps(self, h: float) -> int:
        """Number m of grid steps in the delay window for step h."""
        m = grid_steps(self.r0, h)
        if m < 1:
            raise GridMismatchError(f"grid step {h} exceeds the delay r0={self.r0}")
        return m

    def check_segment(self, seg: Segment) -> None:
        """
        Ensure a segment lives on a grid compatible with this model.

        Raises:
            DimensionMismatchError: If the segment dimension differs from dim
            GridMismatchError: If the segment does not cover [-r0, 0]

        """
        if seg.dim != self.dim:
            raise DimensionMismatchError(self.dim, seg.dim, what="segment")
        if seg.m != self.delay_steps(seg.h):
            raise GridMismatchError(
                f"segment covers {seg.r0} but the model delay is r0={self.r0}"
            )

    def drift(self, window: FloatArray, h: float) -> FloatArray:
        """
        Explicit drift -kappa (X(t) - X(t - r0)) + Z(X(t)) + b(X_t) on windows (..., m+1, n).

        The first term is the derivative of the neutral term L X_t along the path.
        """
        present = window[..., -1, :]
        return (
            -self.kappa * (present - window[..., 0, :])
            + self.drift_z(present)
            + self.drift_b(window, h)
        )
