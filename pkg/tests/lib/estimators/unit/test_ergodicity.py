"""
Unit tests for the ergodicity checks.
"""

import math

import numpy as np
import pytest

from lib.errors import InvalidParameterError, SingularDiffusionError
from lib.estimators import (
    build_observable,
    hyper_check,
    invariant_agreement,
    l2_decay,
    sample_invariant,
    tv_decay,
)
from lib.model.spec import ModelSpec
from lib.montecarlo import MonteCarloOptions
from lib.segment import Segment

H = 0.02


@pytest.mark.unit
class TestTvDecay:
    """Tests for tv_decay."""

    def test_identical_segments(
        self, ornstein: ModelSpec, one: Segment, options: MonteCarloOptions
    ) -> None:
        report = tv_decay(ornstein, one, one, [0.2, 0.4, 0.8], 20, options=options)

        assert report.curve is not None
        assert report.curve["estimate"] == [0.0, 0.0, 0.0]
        assert report.passed is True
        assert report.metadata["decreasing"] is False

    def test_curve_and_bookkeeping(
        self, ornstein: ModelSpec, small_gap: Segment, zero: Segment, options: MonteCarloOptions
    ) -> None:
        report = tv_decay(
            ornstein, small_gap, zero, [0.2, 0.4, 0.8], 60, burn_in=0.4, seed=2, options=options
        )

        assert report.curve is not None
        assert len(report.curve["estimate"]) == 3
        assert all(0.0 <= value for value in report.curve["estimate"])  # type: ignore[operator]
        assert report.metadata["excluded"] == 0
        assert report.metadata["coupling_horizon"] == pytest.approx(0.2)
        assert report.bound == pytest.approx(-0.4 * report.condition.rate)  # type: ignore[union-attr]

    def test_singular_sigma(self, quiet_ornstein: ModelSpec, one: Segment, zero: Segment) -> None:
        with pytest.raises(SingularDiffusionError):
            tv_decay(quiet_ornstein, one, zero, [0.4], 10)

    def test_nonpositive_time(self, ornstein: ModelSpec, one: Segment, zero: Segment) -> None:
        with pytest.raises(InvalidParameterError):
            tv_decay(ornstein, one, zero, [0.0, 0.4], 10)


@pytest.mark.unit
class TestSampleInvariant:
    """Tests for sample_invariant."""

    def test_shape(self, ornstein: ModelSpec, options: MonteCarloOptions) -> None:
        windows = sample_invariant(ornstein, 0.4, 12, H, seed=1, options=options)

        assert windows.shape == (12, 11, 1)

    def test_zero_warmup_returns_start(self, ornstein: ModelSpec, one: Segment) -> None:
        windows = sample_invariant(ornstein, 0.0, 3, H, seed=1, start=one)

        np.testing.assert_array_equal(windows, one.stacked(3))

    def test_negative_warmup(self, ornstein: ModelSpec) -> None:
        with pytest.raises(InvalidParameterError):
            sample_invariant(ornstein, -1.0, 3, H, seed=1)


@pytest.mark.unit
class TestL2Decay:
    """Tests for l2_decay."""

    def test_constant_observable_has_no_variance(
        self, ornstein: ModelSpec, options: MonteCarloOptions
    ) -> None:
        report = l2_decay(
            ornstein,
            build_observable("constant"),
            [0.0, 0.2, 0.4],
            0.4,
            10,
            4,
            h=H,
            options=options,
        )

        assert report.curve is not None
        assert report.curve["variance"] == [0.0, 0.0, 0.0]
        assert report.curve["std_error"] == [0.0, 0.0, 0.0]
        assert report.passed is True
        assert report.trials == 40

    def test_reports_nonnegative_variances(
        self, ornstein: ModelSpec, options: MonteCarloOptions
    ) -> None:
        report = l2_decay(
            ornstein,
            build_observable("cosine_head"),
            [0.0, 0.4],
            1.0,
            40,
            8,
            h=H,
            seed=3,
            options=options,
        )

        assert report.curve is not None
        assert all(value >= 0.0 for value in report.curve["variance"])  # type: ignore[operator]


@pytest.mark.unit
class TestHyperCheck:
    """Tests for hyper_check."""

    def test_constant_observable(self, ornstein: ModelSpec, options: MonteCarloOptions) -> None:
        report = hyper_check(
            ornstein, build_observable("constant"), 0.4, 0.4, 10, 3, h=H, options=options
        )

        assert report.point_estimate == 1.0
        assert report.bound == 1.0
        assert report.passed is True

    def test_capped_head_norm(self, ornstein: ModelSpec, options: MonteCarloOptions) -> None:
        report = hyper_check(
            ornstein, build_observable("capped_head_norm"), 1.0, 1.0, 60, 10, h=H, seed=5, options=options
        )

        assert report.passed is True
        assert 0.0 < report.point_estimate <= 1.0


@pytest.mark.unit
class TestInvariantAgreement:
    """Tests for invariant_agreement."""

    def test_synchronous_bound(
        self, ornstein: ModelSpec, one: Segment, zero: Segment, options: MonteCarloOptions
    ) -> None:
        report = invariant_agreement(
            ornstein, build_observable("capped_head_norm"), one, zero, 2.0, 50, seed=1, options=options
        )

        # The synchronous gap is (1 - h)^k on the grid; its window sup sits at t - r0
        assert report.metadata["wasserstein_bound"] == pytest.approx((1.0 - H) ** 90, rel=1e-6)
        assert report.metadata["wasserstein_bound_std_error"] == pytest.approx(0.0, abs=1e-9)

    def test_identical_segments_use_independent_streams(
        self, ornstein: ModelSpec, one: Segment, options: MonteCarloOptions
    ) -> None:
        report = invariant_agreement(
            ornstein, build_observable("capped_head_norm"), one, one, 1.0, 50, seed=1, options=options
        )

        assert report.point_estimate != 0.0
        assert report.metadata["wasserstein_bound"] == 0.0
        assert math.isfinite(report.std_error)
