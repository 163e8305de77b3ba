"""Model declaration, rate certification and hypothesis verifiers."""

from lib.model.builtin import MODELS, ModelInfo, builtin_model, linear_system, list_models
from lib.model.conditions import ConditionReport, check_conditions, evaluate_rate
from lib.model.spec import DriftB, DriftZ, ModelSpec, zero_delay_drift
from lib.model.verifiers import VerificationReport, verify_dissipativity, verify_h2

__all__ = [
    "MODELS",
    "ConditionReport",
    "DriftB",
    "DriftZ",
    "ModelInfo",
    "ModelSpec",
    "VerificationReport",
    "builtin_model",
    "check_conditions",
    "evaluate_rate",
    "linear_system",
    "list_models",
    "verify_dissipativity",
    "verify_h2",
    "zero_delay_drift",
]
