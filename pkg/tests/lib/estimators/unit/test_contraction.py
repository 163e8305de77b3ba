"""
Unit tests for the synchronous contraction curve.
"""

import math

import numpy as np
import pytest

from lib.errors import GridMismatchError
from lib.estimators import contraction_curve
from lib.model.spec import ModelSpec
from lib.segment import Segment
from lib.simulate.noise import generate_noise

H = 0.02


@pytest.mark.unit
class TestContractionCurve:
    """Tests for contraction_curve."""

    def test_ornstein_rate(self, ornstein: ModelSpec, one: Segment, zero: Segment) -> None:
        noise = generate_noise(1, 0, 100, H, 1)

        report = contraction_curve(ornstein, one, zero, 2.0, noise)

        # The gap decays like (1 - h)^k on the grid whatever the noise
        assert report.point_estimate == pytest.approx(2.0 * math.log(1.0 - H) / H, rel=1e-6)
        assert report.passed is True
        assert report.bound == pytest.approx(-0.9 * report.condition.rate)  # type: ignore[union-attr]
        assert report.curve is not None
        assert report.curve["squared_distance"][0] == 1.0
        assert len(report.curve["time"]) == 101

    def test_identical_segments_pass(self, ornstein: ModelSpec, one: Segment) -> None:
        report = contraction_curve(ornstein, one, one, 1.0, generate_noise(1, 0, 50, H, 1))

        assert report.passed is True
        assert math.isnan(report.point_estimate)
        assert report.metadata["final_distance"] == 0.0

    def test_infeasible_disables_judgment(self, infeasible: ModelSpec) -> None:
        xi = Segment.constant(1.0, 100, H)
        eta = Segment.constant(0.0, 100, H)

        report = contraction_curve(infeasible, xi, eta, 3.0, generate_noise(1, 0, 150, H, 1))

        assert report.passed is None
        assert report.bound is None
        assert report.condition is not None
        assert not report.condition.feasible

    def test_short_noise(self, ornstein: ModelSpec, one: Segment, zero: Segment) -> None:
        with pytest.raises(GridMismatchError):
            contraction_curve(ornstein, one, zero, 2.0, generate_noise(1, 0, 50, H, 1))

    def test_noise_on_another_grid(self, ornstein: ModelSpec, one: Segment, zero: Segment) -> None:
        with pytest.raises(GridMismatchError):
            contraction_curve(ornstein, one, zero, 1.0, generate_noise(1, 0, 100, 0.01, 1))

    @pytest.mark.parametrize(("model", "horizon"), [("ornstein", 2.0), ("neutral_linear", 1.0)])
    def test_curve_is_seed_independent(
        self, model: str, horizon: float, one: Segment, zero: Segment, request: pytest.FixtureRequest
    ) -> None:
        """Linear models give the same curve for every seed up to round-off."""
        spec: ModelSpec = request.getfixturevalue(model)
        steps = round(horizon / H)

        curves = [
            contraction_curve(spec, one, zero, horizon, generate_noise(seed, 0, steps, H, 1)).curve
            for seed in (1, 2, 99)
        ]

        reference = np.asarray(curves[0]["squared_distance"])  # type: ignore[index]
        assert reference[-1] > 0
        for curve in curves[1:]:
            np.testing.assert_allclose(curve["squared_distance"], reference, rtol=1e-9, atol=0.0)  # type: ignore[index]
