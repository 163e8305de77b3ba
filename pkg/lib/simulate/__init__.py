"""Brownian noise generation and Euler integration."""

from lib.simulate.export import export_trajectory, trajectory_frame
from lib.simulate.integrator import (
    Trajectory,
    gamma_consistency,
    gamma_of,
    integrate,
    integrate_batch,
    windows_of,
)
from lib.simulate.noise import NoisePath, derive_seed, generate_noise, noise_block

__all__ = [
    "NoisePath",
    "Trajectory",
    "derive_seed",
    "export_trajectory",
    "gamma_consistency",
    "gamma_of",
    "generate_noise",
    "integrate",
    "integrate_batch",
    "noise_block",
    "trajectory_frame",
    "windows_of",
]
