"""Fixtures for the coupling tests."""

import pytest

from lib.simulate.noise import NoisePath, generate_noise

# (t + r0) / h for a coupling horizon t = 0.5 on the default grid
COUPLED_STEPS = 35


@pytest.fixture
def coupling_noise() -> NoisePath:
    return generate_noise(13, 0, COUPLED_STEPS, 0.02, 1)
