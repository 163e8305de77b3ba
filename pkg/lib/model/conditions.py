"""Certified ergodicity rate from the hypothesis constants."""

import math

from pydantic import BaseModel, ConfigDict, Field

from lib.logging import get_logger
from lib.model.spec import ModelSpec

logger = get_logger(__name__)


class ConditionReport(BaseModel):
    """
    Evaluated rate condition.

    ``rate`` is the certified decay rate lambda; it is None when the gate is not positive.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    rho: float
    gate: float
    rate: float | None = Field(default=None, serialization_alias="lambda")
    feasible: bool
    kappa: float
    r0: float
    lambda1: float
    lambda2: float
    sigma_condition: float | None = None


def evaluate_rate(
    *, kappa: float, r0: float, lambda1: float, lambda2: float
) -> tuple[float, float, float | None]:
    """
    Evaluate rho, the gate and the rate for raw constants.

    rho = lambda1 / (1 + kappa)
    gate = 1 - kappa r0^2 exp(rho r0)
    rate = rho - (kappa r0^2 lambda1 + lambda2) exp(rho r0) / ((1 - kappa) gate), gate > 0

    Returns:
        Tuple (rho, gate, rate); rate is None when gate <= 0

    """
    rho = lambda1 / (1.0 + kappa)
    exponent = rho * r0
    growth = math.exp(exponent) if exponent < 700.0 else math.inf  # noqa: PLR2004
    weight = kappa * r0 * r0
    gate = 1.0 - weight * growth if weight > 0 else 1.0
    if not gate > 0:
        return rho, gate, None
    rate = rho - (weight * lambda1 + lambda2) * growth / ((1.0 - kappa) * gate)
    return rho, gate, rate


def check_conditions(spec: ModelSpec) -> ConditionReport:
    """
    Evaluate the rate condition for a model.

    Infeasibility is a report state, never an error: simulation stays allowed,
    only rate certificates are withheld.
    """
    rho, gate, rate = evaluate_rate(
        kappa=spec.kappa, r0=spec.r0, lambda1=spec.lambda1, lambda2=spec.lambda2
    )
    feasible = gate > 0 and rate is not None and rate > 0
    condition = spec.sigma_condition
    report = ConditionReport(
        rho=rho,
        gate=gate,
        rate=rate,
        feasible=feasible,
        kappa=spec.kappa,
        r0=spec.r0,
        lambda1=spec.lambda1,
        lambda2=spec.lambda2,
        sigma_condition=condition if math.isfinite(condition) else None,
    )
    if not feasible:
        logger.warning(f"Rate condition not met for model '{spec.name}': gate={gate:.4g}")
    return report
