"""Coupling by change of measure and its Girsanov density."""

from lib.coupling.diagnostics import density_mean_check, novikov_diagnostic
from lib.coupling.export import coupling_frame, export_coupling
from lib.coupling.girsanov import (
    DensityResult,
    girsanov_density,
    log_density_batch,
    log_density_from_drift,
    quadratic_variation,
    safe_exp,
)
from lib.coupling.schedule import CouplingSchedule, envelope, g_schedule
from lib.coupling.trace import (
    CouplingBatch,
    CouplingTrace,
    default_tolerance,
    neutral_identity_check,
    run_coupling,
    run_coupling_batch,
)

__all__ = [
    "CouplingBatch",
    "CouplingSchedule",
    "CouplingTrace",
    "DensityResult",
    "coupling_frame",
    "default_tolerance",
    "density_mean_check",
    "envelope",
    "export_coupling",
    "g_schedule",
    "girsanov_density",
    "log_density_batch",
    "log_density_from_drift",
    "neutral_identity_check",
    "novikov_diagnostic",
    "quadratic_variation",
    "run_coupling",
    "run_coupling_batch",
    "safe_exp",
]
