"""Segment-process states on the delay window [-r0, 0].

A segment stores one state vector per grid node theta_j = -r0 + j*h, j = 0..m, so
``values[-1]`` is the present value phi(0) and ``values[0]`` is phi(-r0).
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid

from lib.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError

FloatArray = NDArray[np.float64]

GRID_TOLERANCE = 1e-9


def grid_steps(length: float, h: float) -> int:
    """
    Number of grid steps of size ``h`` spanning ``length``.

    Args:
        length: Time length, must be a multiple of h
        h: Grid step

    Returns:
        The integer k with k*h == length

    Raises:
        GridMismatchError: If h is not positive or does not divide length

    """
    if h <= 0:
        raise GridMismatchError(f"grid step must be positive, got {h}")
    if length < 0:
        raise GridMismatchError(f"length must be nonnegative, got {length}")
    steps = round(length / h)
    if abs(steps * h - length) > GRID_TOLERANCE * max(1.0, abs(length)):
        raise GridMismatchError(f"{length} is not a multiple of the grid step {h}")
    return steps


def trapezoid_window(windows: ArrayLike, h: float) -> FloatArray:
    """Composite trapezoid integral of windows shaped (..., m+1, n) over the delay interval."""
    return np.asarray(trapezoid(np.asarray(windows, dtype=np.float64), dx=h, axis=-2))


def sup_norm(windows: ArrayLike) -> FloatArray:
    """Grid sup-norm of windows shaped (..., m+1, n)."""
    return np.max(np.linalg.norm(np.asarray(windows, dtype=np.float64), axis=-1), axis=-1)


@dataclass(frozen=True, eq=False)
class Segment:
    """
    Function history on [-r0, 0] sampled on a uniform grid.

    The delay is defined by the grid: ``r0 == m * h``. Values are copied into a
    read-only array at construction.
    """

    values: FloatArray
    h: float

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, np.newaxis]
        if values.ndim != 2:  # noqa: PLR2004
            raise DimensionMismatchError(2, values.ndim, what="segment array rank")
        if values.shape[0] < 2:  # noqa: PLR2004
            raise GridMismatchError("a segment needs at least two grid nodes (m >= 1)")
        if values.shape[1] < 1:
            raise DimensionMismatchError(1, 0)
        if not self.h > 0:
            raise GridMismatchError(f"grid step must be positive, got {self.h}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "h", float(self.h))

    @property
    def m(self) -> int:
        return self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def r0(self) -> float:
        return self.m * self.h

    @property
    def head(self) -> FloatArray:
        """Present value phi(0)."""
        return self.values[-1]

    @property
    def nodes(self) -> FloatArray:
        """Grid nodes theta_j in [-r0, 0]."""
        return (np.arange(self.m + 1) - self.m) * self.h

    def same_grid(self, other: "Segment") -> bool:
        return (
            self.m == other.m
            and self.dim == other.dim
            and abs(self.h - other.h) <= GRID_TOLERANCE * self.h
        )

    def stacked(self, count: int) -> FloatArray:
        """Writable copies of the values for a batch of ``count`` trials, (count, m+1, n)."""
        return np.repeat(self.values[np.newaxis], count, axis=0)

    @classmethod
    def constant(cls, value: ArrayLike, m: int, h: float) -> "Segment":
        """Segment identically equal to ``value`` (scalar or n-vector)."""
        vector = np.atleast_1d(np.asarray(value, dtype=np.float64))
        return cls(np.tile(vector, (m + 1, 1)), h)

    @classmethod
    def linear(cls, start: ArrayLike, end: ArrayLike, m: int, h: float) -> "Segment":
        """Segment interpolating linearly from phi(-r0) = start to phi(0) = end."""
        start_vec = np.atleast_1d(np.asarray(start, dtype=np.float64))
        end_vec = np.atleast_1d(np.asarray(end, dtype=np.float64))
        weights = np.linspace(0.0, 1.0, m + 1)[:, np.newaxis]
        return cls(start_vec + weights * (end_vec - start_vec), h)

    @classmethod
    def from_function(
        cls, function: Callable[[float], ArrayLike], m: int, h: float
    ) -> "Segment":
        """Sample ``function(theta)`` at every grid node."""
        nodes = (np.arange(m + 1) - m) * h
        return cls(np.array([np.atleast_1d(function(float(theta))) for theta in nodes]), h)


def uniform_norm(seg: Segment) -> float:
    """Max over grid nodes of the Euclidean norm of the state vector."""
    return float(sup_norm(seg.values))


def neutral_L(seg: Segment, kappa: float) -> FloatArray:
    """
    Neutral operator L(phi) = kappa * integral of phi over [-r0, 0].

    Args:
        seg: Segment to integrate
        kappa: Neutral weight in [0, 1)

    Returns:
        n-dimensional vector

    Raises:
        InvalidParameterError: If kappa is outside [0, 1)

    """
    if not 0.0 <= kappa < 1.0:
        raise InvalidParameterError(f"kappa must lie in [0, 1), got {kappa}")
    return kappa * trapezoid_window(seg.values, seg.h)


def shift_append(seg: Segment, new_value: ArrayLike) -> Segment:
    """
    Advance the window by one grid step.

    Node j of the result holds node j+1 of ``seg``; the last node holds ``new_value``.

    Raises:
        DimensionMismatchError: If new_value is not an n-vector

    """
    vector = np.atleast_1d(np.asarray(new_value, dtype=np.float64))
    if vector.shape != (seg.dim,):
        raise DimensionMismatchError(seg.dim, vector.size)
    return Segment(np.concatenate([seg.values[1:], vector[np.newaxis]]), seg.h)


def segment_distance(first: Segment, second: Segment) -> float:
    """Uniform distance between two segments on the same grid."""
    if not first.same_grid(second):
        raise GridMismatchError("segments live on different grids")
    return float(sup_norm(first.values - second.values))
