"""Shared models, grids and segments for the library tests."""

import pytest

from lib.model.builtin import builtin_model
from lib.model.spec import ModelSpec
from lib.montecarlo import MonteCarloOptions
from lib.segment import Segment

H = 0.02
M = 10  # r0 = 0.2 on the default grid


@pytest.fixture
def h() -> float:
    return H


@pytest.fixture
def ornstein() -> ModelSpec:
    """Z(x) = -x, b = 0, kappa = 0, sigma = 1."""
    return builtin_model("ornstein", {"a": 1.0})


@pytest.fixture
def quiet_ornstein() -> ModelSpec:
    """Ornstein-Uhlenbeck without noise."""
    return builtin_model("ornstein", {"a": 1.0, "sigma": 0.0})


@pytest.fixture
def neutral_linear() -> ModelSpec:
    """Scalar linear model with a point delay and kappa = 0.05."""
    return builtin_model("scalar_linear")


@pytest.fixture
def infeasible() -> ModelSpec:
    """Linear model whose declared constants fail the rate gate."""
    return builtin_model(
        "linear_system",
        {
            "drift_matrix": [[-2.0]],
            "kappa": 0.5,
            "r0": 2.0,
            "constants": {"lambda1": 4.0, "lambda2": 1.0},
        },
    )


@pytest.fixture
def one() -> Segment:
    return Segment.constant(1.0, M, H)


@pytest.fixture
def zero() -> Segment:
    return Segment.constant(0.0, M, H)


@pytest.fixture
def small_gap() -> Segment:
    return Segment.constant(0.2, M, H)


@pytest.fixture
def options() -> MonteCarloOptions:
    return MonteCarloOptions(chunk_size=128)
