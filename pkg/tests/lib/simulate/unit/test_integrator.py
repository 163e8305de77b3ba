"""
Unit tests for the Euler integrator of the neutral equation.
"""

import numpy as np
import pytest

from lib.errors import DimensionMismatchError, GridMismatchError, NonFiniteStateError
from lib.model.builtin import builtin_model
from lib.model.spec import ModelSpec
from lib.segment import Segment
from lib.simulate.integrator import (
    gamma_consistency,
    gamma_of,
    integrate,
    integrate_batch,
    windows_of,
)
from lib.simulate.noise import generate_noise, noise_block


@pytest.mark.unit
class TestIntegrate:
    """Tests for single-trial integration."""

    def test_deterministic_ornstein_matches_euler_recursion(
        self, quiet_ornstein: ModelSpec, one: Segment, h: float
    ) -> None:
        noise = generate_noise(0, 0, 100, h, 1)

        traj = integrate(quiet_ornstein, one, 2.0, noise)

        assert traj.states.shape == (one.m + 1 + 100, 1)
        assert traj.horizon == pytest.approx(2.0)
        assert traj.states[-1, 0] == pytest.approx((1.0 - h) ** 100, rel=1e-12)

    def test_initial_segment_is_kept(self, neutral_linear: ModelSpec, h: float) -> None:
        xi = Segment.linear(-1.0, 1.0, 10, h)
        noise = generate_noise(0, 0, 10, h, 1)

        traj = integrate(neutral_linear, xi, 0.2, noise)

        np.testing.assert_array_equal(traj.states[: xi.m + 1], xi.values)
        np.testing.assert_allclose(traj.times[0], -0.2)

    def test_same_noise_same_path(self, neutral_linear: ModelSpec, one: Segment, h: float) -> None:
        noise = generate_noise(4, 2, 50, h, 1)

        first = integrate(neutral_linear, one, 1.0, noise)
        second = integrate(neutral_linear, one, 1.0, noise)

        np.testing.assert_array_equal(first.states, second.states)

    def test_uses_leading_increments_only(self, ornstein: ModelSpec, one: Segment, h: float) -> None:
        long_noise = generate_noise(4, 2, 80, h, 1)

        traj = integrate(ornstein, one, 1.0, long_noise)

        assert traj.steps == 50

    def test_segment_at(self, ornstein: ModelSpec, one: Segment, h: float) -> None:
        traj = integrate(ornstein, one, 1.0, generate_noise(0, 0, 50, h, 1))

        seg = traj.segment_at(0.4)

        np.testing.assert_array_equal(seg.head, traj.states[one.m + 20])
        assert seg.m == one.m
        with pytest.raises(GridMismatchError):
            traj.segment_at(1.2)

    def test_segment_norms(self, quiet_ornstein: ModelSpec, one: Segment, h: float) -> None:
        traj = integrate(quiet_ornstein, one, 1.0, generate_noise(0, 0, 50, h, 1))

        norms = traj.segment_norms()

        assert norms.shape == (51,)
        assert norms[0] == 1.0
        assert norms[-1] == pytest.approx((1.0 - h) ** 40)

    def test_rejects_short_noise(self, ornstein: ModelSpec, one: Segment, h: float) -> None:
        with pytest.raises(GridMismatchError):
            integrate(ornstein, one, 1.0, generate_noise(0, 0, 10, h, 1))

    def test_rejects_noise_step(self, ornstein: ModelSpec, one: Segment) -> None:
        with pytest.raises(GridMismatchError):
            integrate(ornstein, one, 1.0, generate_noise(0, 0, 200, 0.01, 1))

    def test_rejects_noise_dimension(self, ornstein: ModelSpec, one: Segment, h: float) -> None:
        with pytest.raises(DimensionMismatchError):
            integrate(ornstein, one, 1.0, generate_noise(0, 0, 50, h, 2))

    def test_rejects_horizon_off_grid(self, ornstein: ModelSpec, one: Segment, h: float) -> None:
        with pytest.raises(GridMismatchError):
            integrate(ornstein, one, 0.513, generate_noise(0, 0, 50, h, 1))

    def test_blow_up_reports_step(self) -> None:
        spec = builtin_model("cubic", {"r0": 1.0, "sigma": 0.0})
        xi = Segment.constant(10.0, 2, 0.5)

        with np.errstate(over="ignore", invalid="ignore"), pytest.raises(NonFiniteStateError) as info:
            integrate(spec, xi, 10.0, generate_noise(0, 0, 20, 0.5, 1))

        assert info.value.step >= 1
        assert info.value.trials == [0]


@pytest.mark.unit
class TestIntegrateBatch:
    """Tests for batched integration."""

    def test_batch_rows_match_single_runs(
        self, neutral_linear: ModelSpec, one: Segment, h: float
    ) -> None:
        increments = noise_block(11, [0, 1, 2], 30, h, 1)

        states = integrate_batch(neutral_linear, one.stacked(3), increments, h)

        for row in range(3):
            single = integrate(neutral_linear, one, 0.6, generate_noise(11, row, 30, h, 1))
            np.testing.assert_allclose(states[row], single.states, rtol=1e-12, atol=1e-14)

    def test_windows_of(self) -> None:
        states = np.arange(6.0).reshape(6, 1)

        windows = windows_of(states, 2)

        assert windows.shape == (4, 3, 1)
        np.testing.assert_array_equal(windows[1, :, 0], [1.0, 2.0, 3.0])


@pytest.mark.unit
class TestGamma:
    """Tests for Gamma(t) = X(t) + L X_t."""

    def test_gamma_recorded(self, neutral_linear: ModelSpec, one: Segment, h: float) -> None:
        traj = integrate(neutral_linear, one, 1.0, generate_noise(0, 0, 50, h, 1), with_gamma=True)

        assert traj.gamma is not None
        assert traj.gamma.shape == (51, 1)
        assert traj.gamma[0, 0] == pytest.approx(1.0 + 0.05 * 0.2)

    def test_gamma_of_constant_path(self) -> None:
        states = np.ones((15, 1))

        np.testing.assert_allclose(gamma_of(states, 0.5, 10, 0.02), np.full((5, 1), 1.1))

    def test_consistency_exact_without_neutral_term(
        self, ornstein: ModelSpec, one: Segment, h: float
    ) -> None:
        noise = generate_noise(2, 0, 100, h, 1)
        traj = integrate(ornstein, one, 2.0, noise)

        assert gamma_consistency(traj, ornstein, noise) < 1e-10

    def test_consistency_with_neutral_term(
        self, neutral_linear: ModelSpec, one: Segment, h: float
    ) -> None:
        noise = generate_noise(2, 0, 100, h, 1)
        traj = integrate(neutral_linear, one, 2.0, noise)

        assert gamma_consistency(traj, neutral_linear, noise) < 0.05

    def test_consistency_of_empty_path(self, ornstein: ModelSpec, one: Segment, h: float) -> None:
        noise = generate_noise(2, 0, 0, h, 1)
        traj = integrate(ornstein, one, 0.0, noise)

        assert gamma_consistency(traj, ornstein, noise) == 0.0
