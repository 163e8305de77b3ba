"""
Unit tests for the coupling drift schedule and its envelope.
"""

import math

import numpy as np
import pytest

from lib.coupling.schedule import CouplingSchedule, envelope, g_schedule
from lib.errors import InvalidParameterError


@pytest.mark.unit
class TestSchedule:
    """Tests for g and G in closed form."""

    @pytest.mark.parametrize("kappa1", [2.0, -1.0, 0.5])
    def test_matches_hyperbolic_form(self, kappa1: float) -> None:
        schedule = CouplingSchedule(kappa1=kappa1, gap=1.5, t=1.0)
        r = np.linspace(0.0, 1.0, 11)

        expected_g = 1.5 * kappa1 * np.exp(kappa1 * (r - 1.0)) / math.sinh(kappa1)
        expected_envelope = 1.5 * np.sinh(kappa1 * (1.0 - r)) / math.sinh(kappa1)
        np.testing.assert_allclose(schedule.g(r), expected_g, rtol=1e-12)
        np.testing.assert_allclose(schedule.envelope(r), expected_envelope, rtol=1e-12, atol=1e-15)

    def test_envelope_boundary_values(self) -> None:
        schedule = CouplingSchedule(kappa1=3.0, gap=2.0, t=0.5)

        assert schedule.envelope(0.0) == pytest.approx(2.0)
        assert schedule.envelope(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_envelope_is_nonincreasing(self) -> None:
        values = CouplingSchedule(kappa1=1.0, gap=1.0, t=2.0).envelope(np.linspace(0.0, 2.0, 101))

        assert np.all(np.diff(values) <= 1e-15)

    def test_envelope_solves_its_equation(self) -> None:
        schedule = CouplingSchedule(kappa1=1.5, gap=1.0, t=1.0)
        s = np.linspace(0.1, 0.9, 9)
        step = 1e-6

        derivative = (schedule.envelope(s + step) - schedule.envelope(s - step)) / (2 * step)

        np.testing.assert_allclose(
            derivative, -1.5 * schedule.envelope(s) - schedule.g(s), rtol=1e-6, atol=1e-8
        )

    def test_small_kappa1_limit(self) -> None:
        schedule = CouplingSchedule(kappa1=1e-10, gap=1.0, t=2.0)

        np.testing.assert_allclose(schedule.g(np.array([0.0, 1.0, 2.0])), [0.5, 0.5, 0.5])
        np.testing.assert_allclose(schedule.envelope(np.array([0.0, 1.0, 2.0])), [1.0, 0.5, 0.0])

    def test_vanishes_beyond_horizon(self) -> None:
        schedule = CouplingSchedule(kappa1=1.0, gap=1.0, t=1.0)

        assert schedule.g(1.5) == 0.0
        assert schedule.envelope(1.5) == 0.0

    def test_large_kappa1_does_not_overflow(self) -> None:
        schedule = CouplingSchedule(kappa1=800.0, gap=1.0, t=2.0)

        assert np.all(np.isfinite(schedule.g(np.linspace(0.0, 2.0, 5))))
        assert np.all(np.isfinite(schedule.envelope(np.linspace(0.0, 2.0, 5))))

    def test_rejects_nonpositive_horizon(self) -> None:
        with pytest.raises(InvalidParameterError):
            CouplingSchedule(kappa1=1.0, gap=1.0, t=0.0)


@pytest.mark.unit
class TestFactories:
    """Tests for g_schedule and envelope."""

    def test_gap_from_vectors(self) -> None:
        g = g_schedule(1e-12, [3.0, 0.0], [0.0, 4.0], 1.0)
        envelope_fn = envelope(1e-12, [3.0, 0.0], [0.0, 4.0], 1.0)

        assert g(0.5) == pytest.approx(5.0)
        assert envelope_fn(0.0) == pytest.approx(5.0)

    def test_zero_gap(self) -> None:
        assert g_schedule(1.0, [1.0], [1.0], 1.0)(0.3) == 0.0
