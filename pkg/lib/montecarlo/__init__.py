"""Monte Carlo execution, statistics and report models shared by the estimators."""

from lib.montecarlo.report import EstimateReport, Thresholds, dump_json, finite_payload
from lib.montecarlo.sampling import MonteCarloOptions, run_trials, run_trials_concat, trial_chunks
from lib.montecarlo.statistics import RateFit, decreasing_trend, fit_log_rate, mean_se, top_share

__all__ = [
    "EstimateReport",
    "MonteCarloOptions",
    "RateFit",
    "Thresholds",
    "decreasing_trend",
    "dump_json",
    "finite_payload",
    "fit_log_rate",
    "mean_se",
    "run_trials",
    "run_trials_concat",
    "top_share",
    "trial_chunks",
]
