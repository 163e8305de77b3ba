"""Paired-path CSV and JSON summary of a coupled run."""

import json
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from lib.coupling.trace import CouplingTrace, neutral_identity_check


def coupling_frame(trace: CouplingTrace) -> pd.DataFrame:
    """
    One row per grid time on [-r0, t + r0].

    Columns time, x_i, y_i, gap, and envelope and g (NaN outside [0, t]).
    """
    times = trace.x_traj.times
    data: dict[str, Any] = {"time": times}
    for i in range(trace.x_traj.states.shape[1]):
        data[f"x_{i + 1}"] = trace.x_traj.states[:, i]
        data[f"y_{i + 1}"] = trace.y_traj.states[:, i]
    data["gap"] = trace.gap
    padded = np.full((2, times.size), np.nan)
    start = trace.x_traj.m
    stop = start + trace.g_values.size
    padded[0, start:stop] = trace.envelope
    padded[1, start:stop] = trace.g_values
    data["envelope"] = padded[0]
    data["g"] = padded[1]
    return pd.DataFrame(data)


def coupling_summary(trace: CouplingTrace) -> dict[str, Any]:
    return {
        "t": trace.t,
        "h": trace.h,
        "tau": trace.tau if math.isfinite(trace.tau) else None,
        "coupled": math.isfinite(trace.tau),
        "tol": trace.tol,
        "log_density": trace.log_density,
        "density": trace.density if trace.density is None or math.isfinite(trace.density) else None,
        "neutral_identity_defect": neutral_identity_check(trace),
        "max_gap": float(np.max(trace.gap[trace.x_traj.m :])),
    }


def export_coupling(trace: CouplingTrace, path: Path) -> Path:
    """
    Write ``<path>.csv`` with the paired paths and ``<path>.json`` with the summary.

    Returns:
        Path of the CSV file

    """
    csv_path = path.with_suffix(".csv")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    coupling_frame(trace).to_csv(csv_path, index=False)
    path.with_suffix(".json").write_text(
        json.dumps(coupling_summary(trace), indent=2, sort_keys=True, allow_nan=False)
    )
    return csv_path
