"""
Unit tests for the exponential moment estimators.
"""

import pytest

from lib.errors import InvalidParameterError
from lib.estimators import exp_moment, exp_moment_trend
from lib.model.spec import ModelSpec
from lib.montecarlo import MonteCarloOptions
from lib.segment import Segment


@pytest.mark.unit
class TestExpMoment:
    """Tests for exp_moment."""

    def test_zero_epsilon_is_one(
        self, ornstein: ModelSpec, one: Segment, options: MonteCarloOptions
    ) -> None:
        report = exp_moment(ornstein, one, 0.0, 1.0, 50, options=options)

        assert report.point_estimate == 1.0
        assert report.std_error == 0.0
        assert report.passed is True

    def test_small_epsilon(
        self, ornstein: ModelSpec, one: Segment, options: MonteCarloOptions
    ) -> None:
        report = exp_moment(ornstein, one, 0.1, 1.0, 200, seed=2, options=options)

        assert report.point_estimate > 1.0
        assert report.passed is True
        assert report.metadata["heavy_tail"] is False

    def test_same_seed_same_estimate(
        self, neutral_linear: ModelSpec, one: Segment
    ) -> None:
        first = exp_moment(neutral_linear, one, 0.2, 0.4, 30, seed=5, options=MonteCarloOptions(chunk_size=4))
        second = exp_moment(
            neutral_linear, one, 0.2, 0.4, 30, seed=5, options=MonteCarloOptions(chunk_size=30, workers=2)
        )

        assert first.point_estimate == second.point_estimate

    @pytest.mark.parametrize(("epsilon", "trials"), [(-0.1, 10), (0.1, 0)])
    def test_invalid(
        self, ornstein: ModelSpec, one: Segment, epsilon: float, trials: int
    ) -> None:
        with pytest.raises(InvalidParameterError):
            exp_moment(ornstein, one, epsilon, 1.0, trials)


@pytest.mark.unit
class TestExpMomentTrend:
    """Tests for exp_moment_trend."""

    def test_zero_epsilon_is_flat(
        self, ornstein: ModelSpec, one: Segment, options: MonteCarloOptions
    ) -> None:
        report = exp_moment_trend(ornstein, one, 0.0, [0.4, 0.8, 1.2], 20, options=options)

        assert report.curve is not None
        assert report.curve["estimate"] == [1.0, 1.0, 1.0]
        assert report.metadata["slope"] == pytest.approx(0.0, abs=1e-12)
        assert report.passed is True

    def test_curve_layout(
        self, ornstein: ModelSpec, one: Segment, options: MonteCarloOptions
    ) -> None:
        report = exp_moment_trend(ornstein, one, 0.05, [0.4, 0.8], 40, seed=1, options=options)

        assert report.curve is not None
        assert set(report.curve) == {"time", "estimate", "std_error"}
        assert report.point_estimate == max(report.curve["estimate"])  # type: ignore[type-var]
