"""Reproducible Brownian increments from splittable seed streams.

Every trial owns one stream ``(seed, stream_id)``; its increments never depend on how
trials are grouped into batches or distributed over workers.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from lib.errors import InvalidParameterError

FloatArray = NDArray[np.float64]


def derive_seed(master: int, *keys: int) -> int:
    """Child seed of ``master`` along the spawn path ``keys``."""
    sequence = np.random.SeedSequence(master, spawn_key=tuple(keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def stream_generator(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for one stream of a seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream_id,))))


@dataclass(frozen=True, eq=False)
class NoisePath:
    """Brownian increments dW_k with covariance h * I, reproducible from (seed, stream_id)."""

    increments: FloatArray
    h: float
    seed: int
    stream_id: int

    @property
    def steps(self) -> int:
        return self.increments.shape[0]

    @property
    def dim(self) -> int:
        return self.increments.shape[1]

    def brownian_path(self) -> FloatArray:
        """W(t_k) for k = 0..steps with W(0) = 0."""
        path = np.zeros((self.steps + 1, self.dim))
        path[1:] = np.cumsum(self.increments, axis=0)
        return path


def _check(steps: int, h: float) -> None:
    if steps < 0:
        raise InvalidParameterError(f"steps must be nonnegative, got {steps}")
    if not h > 0:
        raise InvalidParameterError(f"h must be positive, got {h}")


def generate_noise(seed: int, stream_id: int, steps: int, h: float, dim: int) -> NoisePath:
    """
    Gaussian increments for one stream.

    Args:
        seed: 64-bit seed
        stream_id: Stream index
        steps: Number of increments
        h: Grid step (per-coordinate variance)
        dim: Brownian dimension

    Returns:
        NoisePath of shape (steps, dim)

    """
    _check(steps, h)
    increments = stream_generator(seed, stream_id).standard_normal((steps, dim)) * np.sqrt(h)
    increments.setflags(write=False)
    return NoisePath(increments=increments, h=h, seed=seed, stream_id=stream_id)


def noise_block(
    seed: int, stream_ids: Sequence[int] | NDArray[np.int64], steps: int, h: float, dim: int
) -> FloatArray:
    """Increments for several streams stacked as (len(stream_ids), steps, dim)."""
    _check(steps, h)
    block = np.empty((len(stream_ids), steps, dim))
    scale = np.sqrt(h)
    for row, stream_id in enumerate(stream_ids):
        block[row] = stream_generator(seed, int(stream_id)).standard_normal((steps, dim)) * scale
    return block
