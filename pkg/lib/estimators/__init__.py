"""Monte Carlo verification of contraction, concentration, Harnack and ergodicity bounds."""

from lib.estimators.concentration import exp_moment, exp_moment_trend
from lib.estimators.contraction import contraction_curve
from lib.estimators.ergodicity import (
    hyper_check,
    invariant_agreement,
    l2_decay,
    sample_invariant,
    tv_decay,
)
from lib.estimators.harnack import (
    HarnackProtocolResult,
    coupling_harnack_check,
    harnack_check,
    harnack_protocol,
)
from lib.estimators.law import reweighted_law_check
from lib.estimators.observables import Observable, build_observable, list_observables
from lib.estimators.wasserstein import wasserstein_cauchy, wasserstein_decay
from lib.montecarlo import EstimateReport, MonteCarloOptions, Thresholds

__all__ = [
    "EstimateReport",
    "HarnackProtocolResult",
    "MonteCarloOptions",
    "Observable",
    "Thresholds",
    "build_observable",
    "contraction_curve",
    "coupling_harnack_check",
    "exp_moment",
    "exp_moment_trend",
    "harnack_check",
    "harnack_protocol",
    "hyper_check",
    "invariant_agreement",
    "l2_decay",
    "list_observables",
    "reweighted_law_check",
    "sample_invariant",
    "tv_decay",
    "wasserstein_cauchy",
    "wasserstein_decay",
]
