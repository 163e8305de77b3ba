"""CSV and JSON writers for trajectories."""

import json
from pathlib import Path
from typing import Any

import pandas as pd

from lib.model.spec import ModelSpec
from lib.simulate.integrator import Trajectory
from lib.simulate.noise import NoisePath


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """One row per grid time with columns time, x_1..x_n and gamma_i when recorded."""
    data: dict[str, Any] = {"time": traj.times}
    for i in range(traj.states.shape[1]):
        data[f"x_{i + 1}"] = traj.states[:, i]
    frame = pd.DataFrame(data)
    if traj.gamma is not None:
        for i in range(traj.gamma.shape[1]):
            column = [float("nan")] * traj.m + traj.gamma[:, i].tolist()
            frame[f"gamma_{i + 1}"] = column
    return frame


def trajectory_header(
    traj: Trajectory, spec: ModelSpec, noise: NoisePath | None = None
) -> dict[str, Any]:
    """Sidecar fields: model, kappa and the grid, plus the noise stream when known."""
    header: dict[str, Any] = {
        "model": spec.name,
        "kappa": spec.kappa,
        "n": int(traj.states.shape[1]),
        "m": traj.m,
        "h": traj.h,
        "r0": spec.r0,
        "horizon": traj.horizon,
    }
    if noise is not None:
        header |= {"seed": noise.seed, "stream_id": noise.stream_id}
    return header


def export_trajectory(
    traj: Trajectory, path: Path, spec: ModelSpec, *, noise: NoisePath | None = None
) -> Path:
    """
    Write ``<path>.csv`` with the path and ``<path>.json`` with its header.

    Returns:
        Path of the CSV file

    """
    csv_path = path.with_suffix(".csv")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(traj).to_csv(csv_path, index=False)
    path.with_suffix(".json").write_text(
        json.dumps(trajectory_header(traj, spec, noise), indent=2, sort_keys=True)
    )
    return csv_path
