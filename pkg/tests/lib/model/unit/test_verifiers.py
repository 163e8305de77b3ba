"""
Unit tests for the sampling hypothesis verifiers.
"""

import dataclasses

import numpy as np
import pytest

from lib.errors import InvalidParameterError
from lib.model.builtin import builtin_model
from lib.model.spec import ModelSpec
from lib.model.verifiers import sample_ball, sample_segments, verify_dissipativity, verify_h2


@pytest.mark.unit
class TestSampling:
    """Tests for the sample generators."""

    def test_ball_samples_stay_inside(self) -> None:
        samples = sample_ball(np.random.default_rng(0), 500, 3, 2.0)

        assert samples.shape == (500, 3)
        assert np.all(np.linalg.norm(samples, axis=-1) <= 2.0 + 1e-12)

    def test_segments_are_bounded(self) -> None:
        segments = sample_segments(np.random.default_rng(0), 50, 2, 1.5, 10, 4)

        assert segments.shape == (50, 11, 2)
        assert np.all(np.linalg.norm(segments, axis=-1) <= 1.5 + 1e-12)


@pytest.mark.unit
class TestVerifyDissipativity:
    """Tests for verify_dissipativity."""

    def test_linear_drift_holds(self, ornstein: ModelSpec) -> None:
        report = verify_dissipativity(ornstein, 1000, 5.0, seed=1)

        assert report.violations == 0
        assert report.sample_count == 1000
        assert report.check == "dissipativity"

    def test_cubic_drift_holds(self) -> None:
        report = verify_dissipativity(builtin_model("cubic", {"dim": 2}), 1000, 3.0)

        assert report.violations == 0

    def test_overstated_constant_is_caught(self, ornstein: ModelSpec) -> None:
        overstated = dataclasses.replace(ornstein, kappa1=5.0)

        report = verify_dissipativity(overstated, 200, 5.0)

        assert report.violations > 0
        assert report.worst_margin > 0

    def test_is_reproducible(self, ornstein: ModelSpec) -> None:
        first = verify_dissipativity(ornstein, 100, 1.0, seed=3)
        second = verify_dissipativity(ornstein, 100, 1.0, seed=3)

        assert first == second

    @pytest.mark.parametrize(("count", "radius"), [(0, 1.0), (10, 0.0)])
    def test_rejects_budget(self, ornstein: ModelSpec, count: int, radius: float) -> None:
        with pytest.raises(InvalidParameterError):
            verify_dissipativity(ornstein, count, radius)


@pytest.mark.unit
class TestVerifyH2:
    """Tests for verify_h2."""

    @pytest.mark.parametrize("name", ["ornstein", "scalar_linear"])
    def test_derived_constants_hold(self, name: str) -> None:
        report = verify_h2(builtin_model(name), 1000, 3.0, m=10, seed=2)

        assert report.violations == 0
        assert report.check == "h2"

    def test_overstated_lambda1_is_caught(self) -> None:
        spec = builtin_model("scalar_linear")
        overstated = dataclasses.replace(spec, lambda1=40.0, lambda2=0.01)

        report = verify_h2(overstated, 500, 3.0, m=10)

        assert report.violations > 0

    def test_rejects_single_knot(self, ornstein: ModelSpec) -> None:
        with pytest.raises(InvalidParameterError):
            verify_h2(ornstein, 10, 1.0, knots=1)


@pytest.mark.unit
class TestDissipativityMonotonicity:
    """Declaring a larger kappa1 can only add violations on the same samples."""

    def test_violations_grow_with_kappa1(self, ornstein: ModelSpec) -> None:
        reports = [
            verify_dissipativity(dataclasses.replace(ornstein, kappa1=kappa1), 500, 2.0, seed=5)
            for kappa1 in (0.0, 0.5, 1.0, 1.2, 2.0, 4.0)
        ]

        violations = [report.violations for report in reports]
        margins = [report.worst_margin for report in reports]
        assert violations == sorted(violations)
        assert margins == sorted(margins)
        assert violations[2] == 0
        assert violations[-1] == 500
