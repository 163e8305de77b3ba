"""
Unit tests for coupling by change of measure.
"""

import math

import numpy as np
import pytest

from lib.coupling.schedule import CouplingSchedule
from lib.coupling.trace import (
    CouplingTrace,
    default_tolerance,
    neutral_identity_check,
    run_coupling,
    run_coupling_batch,
)
from lib.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError
from lib.model.spec import ModelSpec
from lib.segment import Segment, segment_distance
from lib.simulate.integrator import integrate
from lib.simulate.noise import NoisePath, generate_noise, noise_block

T = 0.5


@pytest.mark.unit
class TestRunCoupling:
    """Tests for single coupled runs."""

    def test_couples_by_the_horizon(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)

        assert math.isfinite(trace.tau)
        assert trace.tau <= T + 1e-12

    def test_paths_coincide_after_coupling(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)
        start = one.m + round(trace.tau / trace.h)

        np.testing.assert_array_equal(trace.y_traj.states[start:], trace.x_traj.states[start:])

    def test_y_starts_from_eta(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)

        np.testing.assert_array_equal(trace.y_traj.states[: one.m + 1], zero.values)
        np.testing.assert_array_equal(trace.x_traj.states[: one.m + 1], one.values)

    def test_x_is_the_plain_solution(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)
        plain = integrate(neutral_linear, one, T + neutral_linear.r0, coupling_noise)

        np.testing.assert_allclose(trace.x_traj.states, plain.states, rtol=1e-12, atol=1e-14)

    def test_gap_stays_near_envelope(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)
        gap = trace.gap[one.m : one.m + trace.envelope.size]

        assert trace.envelope[0] == pytest.approx(1.0)
        assert np.max(gap - trace.envelope) < 0.05

    def test_identical_segments_couple_at_once(
        self, neutral_linear: ModelSpec, one: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, one, T, coupling_noise)

        assert trace.tau == 0.0
        assert trace.log_density == 0.0
        assert trace.density == 1.0
        np.testing.assert_array_equal(trace.h_values, np.zeros_like(trace.h_values))

    def test_density_is_finite_and_positive(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)

        assert trace.density is not None
        assert trace.log_density is not None
        assert trace.density == pytest.approx(math.exp(trace.log_density))

    def test_singular_sigma_omits_density(
        self, quiet_ornstein: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(quiet_ornstein, one, zero, T, coupling_noise)

        assert trace.density is None
        assert trace.log_density is None
        assert trace.tau <= T + 1e-12

    def test_default_tolerance(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)

        assert trace.tol == pytest.approx(2e-8)
        np.testing.assert_allclose(default_tolerance([0.0, 1.0]), [1e-8, 2e-8])

    def test_large_tolerance_couples_immediately(
        self, neutral_linear: ModelSpec, small_gap: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, small_gap, zero, T, coupling_noise, tol=1.0)

        assert trace.tau == 0.0

    def test_rejects_grid_mismatch(
        self, neutral_linear: ModelSpec, one: Segment, coupling_noise: NoisePath
    ) -> None:
        with pytest.raises(GridMismatchError):
            run_coupling(neutral_linear, one, Segment.constant([0.0], 5, 0.04), T, coupling_noise)

    def test_rejects_noise_dimension(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment
    ) -> None:
        with pytest.raises(DimensionMismatchError):
            run_coupling(neutral_linear, one, zero, T, generate_noise(0, 0, 35, 0.02, 2))

    def test_rejects_short_noise(self, neutral_linear: ModelSpec, one: Segment, zero: Segment) -> None:
        with pytest.raises(GridMismatchError):
            run_coupling(neutral_linear, one, zero, T, generate_noise(0, 0, 30, 0.02, 1))

    def test_rejects_nonpositive_tolerance(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        with pytest.raises(InvalidParameterError):
            run_coupling(neutral_linear, one, zero, T, coupling_noise, tol=0.0)


@pytest.mark.unit
class TestNeutralCorrections:
    """Tests for h1, h2 and the neutral identity."""

    def test_split_at_delay(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)
        m = one.m

        np.testing.assert_array_equal(trace.h1[m + 1 :], 0.0)
        np.testing.assert_array_equal(trace.h2[: m + 1], 0.0)
        assert trace.h1[0, 0] == pytest.approx(0.05 * (0.0 - 1.0) - 0.05 * (0.0 - 1.0))

    def test_identity_defect_is_small(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)

        assert neutral_identity_check(trace) < 0.01

    def test_no_neutral_term_no_correction(
        self, ornstein: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        trace = run_coupling(ornstein, one, zero, T, coupling_noise)

        np.testing.assert_array_equal(trace.h1 + trace.h2, 0.0)
        assert neutral_identity_check(trace) == 0.0


@pytest.mark.unit
class TestRunCouplingBatch:
    """Tests for batched coupling."""

    def test_rows_match_single_runs(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, h: float
    ) -> None:
        increments = noise_block(21, [0, 1, 2], 35, h, 1)

        batch = run_coupling_batch(neutral_linear, one.stacked(3), zero.stacked(3), T, increments, h)

        for row in range(3):
            trace = run_coupling(neutral_linear, one, zero, T, generate_noise(21, row, 35, h, 1))
            np.testing.assert_allclose(batch.y_states[row], trace.y_traj.states, rtol=1e-10, atol=1e-12)
            assert batch.tau_steps[row] * h == pytest.approx(trace.tau)

    def test_every_trial_couples(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, h: float
    ) -> None:
        increments = noise_block(5, np.arange(64), 35, h, 1)

        batch = run_coupling_batch(neutral_linear, one.stacked(64), zero.stacked(64), T, increments, h)

        assert np.all(batch.tau_steps >= 1)
        assert np.all(batch.tau_steps <= batch.coupling_steps)
        np.testing.assert_array_equal(batch.final_windows, batch.y_states[:, -(one.m + 1) :])

    def test_rejects_short_horizon(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, h: float
    ) -> None:
        increments = noise_block(5, [0], 35, h, 1)

        with pytest.raises(InvalidParameterError):
            run_coupling_batch(neutral_linear, one.stacked(1), zero.stacked(1), 0.0, increments, h)


def _envelope_defect(trace: CouplingTrace) -> float:
    """max_k |gap(t_k) - G(t_k)| / h over the coupling horizon."""
    m = trace.x_traj.m
    gap = trace.gap[m : m + trace.envelope.size]
    return float(np.max(np.abs(gap - trace.envelope))) / trace.h


@pytest.mark.unit
class TestEnvelopeBounds:
    """The envelope G bounds the gap, the segment gap and the neutral correction h1."""

    def test_defect_is_first_order(self, neutral_linear: ModelSpec) -> None:
        """The constant C in |X - Y| <= G + C h does not grow when h is halved."""
        constants = []
        for h in (0.02, 0.01):
            m = round(neutral_linear.r0 / h)
            noise = generate_noise(13, 0, round((T + neutral_linear.r0) / h), h, 1)
            trace = run_coupling(
                neutral_linear, Segment.constant(1.0, m, h), Segment.constant(0.0, m, h), T, noise
            )
            constants.append(_envelope_defect(trace))

        coarse, fine = constants
        assert 0 < coarse < 10
        assert 0.4 <= fine / coarse <= 2.5

    def test_gap_bound_holds_for_many_seeds(self, neutral_linear: ModelSpec, one: Segment, zero: Segment) -> None:
        reference = run_coupling(neutral_linear, one, zero, T, generate_noise(0, 0, 35, 0.02, 1))
        bound = reference.envelope + _envelope_defect(reference) * reference.h + 1e-12
        trials = 100
        batch = run_coupling_batch(
            neutral_linear,
            one.stacked(trials),
            zero.stacked(trials),
            T,
            noise_block(17, np.arange(trials), 35, 0.02, 1),
            0.02,
        )

        gaps = np.linalg.norm(batch.x_states - batch.y_states, axis=-1)[:, one.m : one.m + bound.size]
        assert np.all(gaps <= bound)

    def test_h1_is_bounded_by_the_envelope(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        """|h1(t_k)| <= kappa (G(t_k) + C h + ||xi - eta||) on [0, r0]."""
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)
        m = one.m
        slack = _envelope_defect(trace) * trace.h

        bound = trace.kappa * (trace.envelope[: m + 1] + slack + segment_distance(one, zero))
        assert np.all(np.linalg.norm(trace.h1[: m + 1], axis=-1) <= bound + 1e-12)
        assert np.any(np.linalg.norm(trace.h1[1 : m + 1], axis=-1) > 0)

    def test_segment_gap_bound(
        self, neutral_linear: ModelSpec, one: Segment, zero: Segment, coupling_noise: NoisePath
    ) -> None:
        """||X_s - Y_s|| stays below ||xi - eta|| on [0, r0] and below G(s - r0) + C h later."""
        trace = run_coupling(neutral_linear, one, zero, T, coupling_noise)
        m, h = one.m, trace.h
        schedule = CouplingSchedule(kappa1=neutral_linear.kappa1, gap=1.0, t=T)
        slack = _envelope_defect(trace) * h
        segment_gaps = np.max(np.lib.stride_tricks.sliding_window_view(trace.gap, m + 1), axis=-1)

        assert np.all(segment_gaps[: m + 1] <= segment_distance(one, zero) + 1e-12)
        for k in range(m + 1, segment_gaps.size):
            assert segment_gaps[k] <= schedule.envelope((k - m) * h) + slack + 1e-12
