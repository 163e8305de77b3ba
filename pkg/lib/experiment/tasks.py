"""Registry of experiment tasks.

Each task validates its parameters with a pydantic model and turns them into one or more
EstimateReports. ``passed`` follows the producing operation's decision rule; None means
the task has no pass/fail semantics in this configuration.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from lib.coupling import (
    CouplingTrace,
    density_mean_check,
    export_coupling,
    neutral_identity_check,
    novikov_diagnostic,
    run_coupling,
)
from lib.errors import UnknownTaskError
from lib.estimators import (
    contraction_curve,
    coupling_harnack_check,
    exp_moment,
    exp_moment_trend,
    harnack_check,
    harnack_protocol,
    hyper_check,
    invariant_agreement,
    l2_decay,
    reweighted_law_check,
    tv_decay,
    wasserstein_cauchy,
    wasserstein_decay,
)
from lib.experiment.params import (
    AgreementParams,
    CauchyDecayParams,
    CauchyParams,
    ContractionParams,
    CouplingHarnackParams,
    CouplingParams,
    ExpMomentParams,
    ExpMomentTrendParams,
    HarnackParams,
    HarnackProtocolParams,
    HyperParams,
    L2Params,
    LawParams,
    NoParams,
    PairParams,
    PathParams,
    SegmentConfig,
    TaskParams,
    TvParams,
    VerifyH2Params,
    VerifyParams,
)
from lib.logging import get_logger
from lib.model.conditions import ConditionReport
from lib.model.spec import ModelSpec
from lib.model.verifiers import VerificationReport, verify_dissipativity, verify_h2
from lib.montecarlo import EstimateReport, MonteCarloOptions
from lib.segment import Segment, grid_steps
from lib.simulate import export_trajectory, gamma_consistency, generate_noise, integrate

logger = get_logger(__name__)


@dataclass(frozen=True)
class TaskContext:
    """Everything a task needs besides its own parameters."""

    spec: ModelSpec
    h: float
    horizon: float
    seed: int
    trials: int
    options: MonteCarloOptions
    condition: ConditionReport
    label: str
    output_dir: Path | None = None

    @property
    def m(self) -> int:
        return self.spec.delay_steps(self.h)

    def segment(self, config: SegmentConfig) -> Segment:
        return config.build(self.m, self.h, self.spec.dim)

    def trials_for(self, params: TaskParams) -> int:
        return params.trials or self.trials

    def export_path(self, suffix: str) -> Path | None:
        if self.output_dir is None:
            return None
        return self.output_dir / f"{self.label}_{suffix}"


TaskRunner = Callable[[TaskContext, Any], list[EstimateReport]]


@dataclass(frozen=True)
class TaskDefinition:
    name: str
    description: str
    params_model: type[TaskParams]
    runner: TaskRunner


def _condition_report(context: TaskContext, _params: NoParams) -> list[EstimateReport]:
    condition = context.condition
    return [
        EstimateReport(
            name="check_conditions",
            point_estimate=condition.rate if condition.rate is not None else math.nan,
            passed=condition.feasible,
            bound=0.0,
            metadata={"rho": condition.rho, "gate": condition.gate},
        )
    ]


def _verification(report: VerificationReport) -> EstimateReport:
    return EstimateReport(
        name=f"verify_{report.check}",
        point_estimate=report.worst_margin,
        trials=report.sample_count,
        passed=report.violations == 0,
        bound=0.0,
        metadata={"violations": report.violations, "radius": report.radius},
    )


def _verify_dissipativity(context: TaskContext, params: VerifyParams) -> list[EstimateReport]:
    return [
        _verification(
            verify_dissipativity(context.spec, params.sample_count, params.radius, seed=context.seed)
        )
    ]


def _verify_h2(context: TaskContext, params: VerifyH2Params) -> list[EstimateReport]:
    report = verify_h2(
        context.spec,
        params.sample_count,
        params.radius,
        m=context.m,
        knots=params.knots,
        seed=context.seed,
    )
    return [_verification(report)]


def _optional_check(value: float, tolerance: float | None) -> bool | None:
    return None if tolerance is None else value <= tolerance


def _simulate(context: TaskContext, params: PathParams) -> list[EstimateReport]:
    noise = generate_noise(
        context.seed, params.stream, grid_steps(params.t, context.h), context.h, context.spec.dim
    )
    traj = integrate(context.spec, context.segment(params.xi), params.t, noise, with_gamma=True)
    path = context.export_path("trajectory")
    if params.export and path is not None:
        export_trajectory(traj, path, context.spec, noise=noise)
    norms = traj.segment_norms()
    return [
        EstimateReport(
            name="simulate",
            point_estimate=float(norms[-1]),
            trials=1,
            metadata={"t": params.t, "max_segment_norm": float(norms.max()), "stream": params.stream},
        )
    ]


def _gamma_consistency(context: TaskContext, params: PathParams) -> list[EstimateReport]:
    noise = generate_noise(
        context.seed, params.stream, grid_steps(params.t, context.h), context.h, context.spec.dim
    )
    traj = integrate(context.spec, context.segment(params.xi), params.t, noise)
    defect = gamma_consistency(traj, context.spec, noise)
    return [
        EstimateReport(
            name="gamma_consistency",
            point_estimate=defect,
            trials=1,
            passed=_optional_check(defect, params.tolerance),
            bound=params.tolerance,
            metadata={"t": params.t, "h": context.h},
        )
    ]


def _coupled_pair(context: TaskContext, params: CouplingParams) -> CouplingTrace:
    steps = grid_steps(params.t, context.h) + context.m
    noise = generate_noise(context.seed, params.stream, steps, context.h, context.spec.dim)
    return run_coupling(
        context.spec,
        context.segment(params.xi),
        context.segment(params.eta),
        params.t,
        noise,
        tol=params.tol,
    )


def _coupling(context: TaskContext, params: CouplingParams) -> list[EstimateReport]:
    trace = _coupled_pair(context, params)
    path = context.export_path("coupling")
    if params.export and path is not None:
        export_coupling(trace, path)
    before = trace.gap[context.m : context.m + trace.envelope.size]
    excess = float(np.max(before - trace.envelope))
    return [
        EstimateReport(
            name="coupling",
            point_estimate=trace.tau,
            trials=1,
            passed=trace.tau <= params.t + context.h * (1 + 1e-9),
            bound=params.t,
            metadata={
                "log_density": trace.log_density,
                "density": trace.density,
                "envelope_excess": excess,
                "neutral_identity_defect": neutral_identity_check(trace),
            },
        )
    ]


def _neutral_identity(context: TaskContext, params: CouplingParams) -> list[EstimateReport]:
    defect = neutral_identity_check(_coupled_pair(context, params))
    return [
        EstimateReport(
            name="neutral_identity",
            point_estimate=defect,
            trials=1,
            passed=_optional_check(defect, params.tolerance),
            bound=params.tolerance,
            metadata={"t": params.t, "h": context.h},
        )
    ]


def _novikov(context: TaskContext, params: PairParams) -> list[EstimateReport]:
    return [
        novikov_diagnostic(
            context.spec,
            context.segment(params.xi),
            context.segment(params.eta),
            params.t,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _girsanov_mean(context: TaskContext, params: PairParams) -> list[EstimateReport]:
    return [
        density_mean_check(
            context.spec,
            context.segment(params.xi),
            context.segment(params.eta),
            params.t,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _contraction(context: TaskContext, params: ContractionParams) -> list[EstimateReport]:
    noise = generate_noise(
        context.seed,
        params.stream,
        grid_steps(params.horizon, context.h),
        context.h,
        context.spec.dim,
    )
    return [
        contraction_curve(
            context.spec,
            context.segment(params.xi),
            context.segment(params.eta),
            params.horizon,
            noise,
            options=context.options,
        )
    ]


def _exp_moment(context: TaskContext, params: ExpMomentParams) -> list[EstimateReport]:
    return [
        exp_moment(
            context.spec,
            context.segment(params.xi),
            params.epsilon,
            params.t,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _exp_moment_trend(context: TaskContext, params: ExpMomentTrendParams) -> list[EstimateReport]:
    return [
        exp_moment_trend(
            context.spec,
            context.segment(params.xi),
            params.epsilon,
            params.t_grid,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _harnack(context: TaskContext, params: HarnackParams) -> list[EstimateReport]:
    return [
        harnack_check(
            context.spec,
            params.observable.build(),
            context.segment(params.xi),
            context.segment(params.eta),
            params.t_total,
            params.c,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _harnack_protocol(context: TaskContext, params: HarnackProtocolParams) -> list[EstimateReport]:
    result = harnack_protocol(
        context.spec,
        params.observable.build(),
        context.segment(params.xi),
        context.segment(params.eta),
        params.t_total,
        context.trials_for(params),
        factor=params.factor,
        seed=context.seed,
        options=context.options,
    )
    return result.reports


def _coupling_harnack(context: TaskContext, params: CouplingHarnackParams) -> list[EstimateReport]:
    return [
        coupling_harnack_check(
            context.spec,
            params.observable.build(),
            context.segment(params.xi),
            context.segment(params.eta),
            params.t,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _reweighted_law(context: TaskContext, params: LawParams) -> list[EstimateReport]:
    return reweighted_law_check(
        context.spec,
        context.segment(params.xi),
        context.segment(params.eta),
        params.t,
        [observable.build() for observable in params.observables],
        context.trials_for(params),
        seed=context.seed,
        options=context.options,
    )


def _tv_decay(context: TaskContext, params: TvParams) -> list[EstimateReport]:
    return [
        tv_decay(
            context.spec,
            context.segment(params.xi),
            context.segment(params.eta),
            params.t_grid,
            context.trials_for(params),
            coupling_horizon=params.coupling_horizon,
            burn_in=params.burn_in,
            seed=context.seed,
            options=context.options,
        )
    ]


def _wasserstein_cauchy(context: TaskContext, params: CauchyParams) -> list[EstimateReport]:
    return [
        wasserstein_cauchy(
            context.spec,
            context.segment(params.xi),
            params.t1,
            params.t2,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _wasserstein_decay(context: TaskContext, params: CauchyDecayParams) -> list[EstimateReport]:
    return [
        wasserstein_decay(
            context.spec,
            context.segment(params.xi),
            params.t1_grid,
            params.offset,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


def _l2_decay(context: TaskContext, params: L2Params) -> list[EstimateReport]:
    return [
        l2_decay(
            context.spec,
            params.observable.build(),
            params.t_grid,
            params.warmup,
            params.trials_outer,
            params.trials_inner,
            h=context.h,
            start=context.segment(params.start),
            seed=context.seed,
            options=context.options,
        )
    ]


def _hyper(context: TaskContext, params: HyperParams) -> list[EstimateReport]:
    return [
        hyper_check(
            context.spec,
            params.observable.build(),
            params.t,
            params.warmup,
            params.trials_outer,
            params.trials_inner,
            h=context.h,
            start=context.segment(params.start),
            seed=context.seed,
            options=context.options,
        )
    ]


def _agreement(context: TaskContext, params: AgreementParams) -> list[EstimateReport]:
    return [
        invariant_agreement(
            context.spec,
            params.observable.build(),
            context.segment(params.xi),
            context.segment(params.eta),
            params.t,
            context.trials_for(params),
            seed=context.seed,
            options=context.options,
        )
    ]


TASKS: dict[str, TaskDefinition] = {
    definition.name: definition
    for definition in (
        TaskDefinition(
            "check_conditions",
            "Certified rate lambda, gate and feasibility from the hypothesis constants",
            NoParams,
            _condition_report,
        ),
        TaskDefinition(
            "verify_dissipativity",
            "Sample the one-sided condition <Z(x)-Z(y), x-y> <= -kappa1 |x-y|^2",
            VerifyParams,
            _verify_dissipativity,
        ),
        TaskDefinition(
            "verify_h2",
            "Sample the segment dissipativity hypothesis with lambda1, lambda2",
            VerifyH2Params,
            _verify_h2,
        ),
        TaskDefinition("simulate", "Integrate one path and export it", PathParams, _simulate),
        TaskDefinition(
            "gamma_consistency",
            "Max defect of Gamma(t) = X(t) + L X_t against its integral equation",
            PathParams,
            _gamma_consistency,
        ),
        TaskDefinition(
            "coupling",
            "One coupling run by change of measure, with tau, envelope excess and density",
            CouplingParams,
            _coupling,
        ),
        TaskDefinition(
            "neutral_identity",
            "Max defect of d L(Y - X) = (h1 + h2) ds along one coupling run",
            CouplingParams,
            _neutral_identity,
        ),
        TaskDefinition(
            "novikov_diagnostic",
            "E exp(1/2 int |sigma^-1 h|^2) with a divergence flag",
            PairParams,
            _novikov,
        ),
        TaskDefinition(
            "girsanov_mean",
            "Sample mean of the coupling density R against 1",
            PairParams,
            _girsanov_mean,
        ),
        TaskDefinition(
            "contraction_curve",
            "Synchronous ||X_t(xi) - X_t(eta)||^2 and its fitted rate",
            ContractionParams,
            _contraction,
        ),
        TaskDefinition(
            "exp_moment",
            "E exp(eps ||X_t||^2) with a heavy-tail flag",
            ExpMomentParams,
            _exp_moment,
        ),
        TaskDefinition(
            "exp_moment_trend",
            "Exponential moments along a time grid and their trend",
            ExpMomentTrendParams,
            _exp_moment_trend,
        ),
        TaskDefinition(
            "harnack_check",
            "(P_t f(xi))^2 <= P_t f^2(eta) exp(c ||xi - eta||^2) with the fitted c*",
            HarnackParams,
            _harnack,
        ),
        TaskDefinition(
            "harnack_protocol",
            "Measure c*, freeze c = factor c*, re-verify on fresh streams",
            HarnackProtocolParams,
            _harnack_protocol,
        ),
        TaskDefinition(
            "coupling_harnack_check",
            "(P f(eta))^2 <= E[R^2] P f^2(xi) at t + r0 from coupled runs",
            CouplingHarnackParams,
            _coupling_harnack,
        ),
        TaskDefinition(
            "reweighted_law_check",
            "E[R phi(X(xi))] = E[phi(X(eta))] at t + r0 for each observable",
            LawParams,
            _reweighted_law,
        ),
        TaskDefinition(
            "tv_decay",
            "Upper bounds E|1 - R| on the total variation distance along t",
            TvParams,
            _tv_decay,
        ),
        TaskDefinition(
            "wasserstein_cauchy",
            "Synchronous bound on W(P_t1(xi), P_t2(xi))",
            CauchyParams,
            _wasserstein_cauchy,
        ),
        TaskDefinition(
            "wasserstein_decay",
            "Cauchy bounds along t1 at a fixed offset and their rate",
            CauchyDecayParams,
            _wasserstein_decay,
        ),
        TaskDefinition(
            "l2_decay",
            "Variance of P_t f under the warmed-up law along t",
            L2Params,
            _l2_decay,
        ),
        TaskDefinition(
            "hyper_check",
            "4-norm of P_t f against the 2-norm of f under the warmed-up law",
            HyperParams,
            _hyper,
        ),
        TaskDefinition(
            "invariant_agreement",
            "Means of f after long runs from xi and eta agree",
            AgreementParams,
            _agreement,
        ),
    )
}


def list_tasks() -> list[TaskDefinition]:
    """Registered tasks in stable (alphabetical) order."""
    return [TASKS[name] for name in sorted(TASKS)]


def get_task(name: str) -> TaskDefinition:
    """
    Raises:
        UnknownTaskError: If the task is not registered

    """
    if name not in TASKS:
        raise UnknownTaskError(name, sorted(TASKS))
    return TASKS[name]


def describe_task(name: str) -> str:
    """Human-readable description of a task and its parameters with their defaults."""
    definition = get_task(name)
    lines = [f"{definition.name}: {definition.description}", "parameters:"]
    for field_name, field in definition.params_model.model_fields.items():
        if field.is_required():
            default = "required"
        elif field.default_factory is not None:
            default = f"default {field.default_factory()}"  # type: ignore[call-arg]
        else:
            default = f"default {field.default}"
        lines.append(f"  {field_name} ({default})")
    return "\n".join(lines)
