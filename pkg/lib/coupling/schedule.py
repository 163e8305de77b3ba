"""Closed-form drift schedule g and envelope G of the coupling.

g(r) = gap * kappa1 * exp(kappa1 (r - t)) / sinh(kappa1 t)
G(s) = gap * sinh(kappa1 (t - s)) / sinh(kappa1 t)

G solves G' = -kappa1 G - g with G(0) = gap and G(t) = 0. Both are evaluated in
overflow-free forms and replaced by their limits gap / t and gap (t - s) / t when
|kappa1| < 1e-8. Beyond t both vanish.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.errors import InvalidParameterError

FloatArray = NDArray[np.float64]

KAPPA1_LIMIT = 1e-8


@dataclass(frozen=True)
class CouplingSchedule:
    """Schedule for an initial gap |xi(0) - eta(0)| to be closed by time t."""

    kappa1: float
    gap: float
    t: float

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise InvalidParameterError(f"coupling horizon must be positive, got {self.t}")

    def g(self, r: ArrayLike) -> FloatArray:
        """Drift magnitude g(r), extended by zero beyond t."""
        r = np.asarray(r, dtype=np.float64)
        k, t = self.kappa1, self.t
        if abs(k) < KAPPA1_LIMIT:
            values = np.full_like(r, 1.0 / t)
        elif k > 0:
            values = 2.0 * k * np.exp(k * (r - 2.0 * t)) / -np.expm1(-2.0 * k * t)
        else:
            values = 2.0 * k * np.exp(k * r) / np.expm1(2.0 * k * t)
        return np.where((r >= 0) & (r <= t), self.gap * values, 0.0)

    def envelope(self, s: ArrayLike) -> FloatArray:
        """Envelope G(s): G(0) = gap, G(t) = 0, nonincreasing."""
        s = np.clip(np.asarray(s, dtype=np.float64), 0.0, self.t)
        k, t = self.kappa1, self.t
        if abs(k) < KAPPA1_LIMIT:
            values = (t - s) / t
        elif k > 0:
            values = np.exp(-k * s) * np.expm1(-2.0 * k * (t - s)) / np.expm1(-2.0 * k * t)
        else:
            values = np.exp(k * s) * np.expm1(2.0 * k * (t - s)) / np.expm1(2.0 * k * t)
        return self.gap * values


def _gap(xi0: ArrayLike, eta0: ArrayLike) -> float:
    return float(np.linalg.norm(np.atleast_1d(np.asarray(xi0) - np.asarray(eta0))))


def g_schedule(
    kappa1: float, xi0: ArrayLike, eta0: ArrayLike, t: float
) -> Callable[[ArrayLike], FloatArray]:
    """
    Drift schedule g on [0, t].

    Raises:
        InvalidParameterError: If t <= 0

    """
    return CouplingSchedule(kappa1=kappa1, gap=_gap(xi0, eta0), t=t).g


def envelope(
    kappa1: float, xi0: ArrayLike, eta0: ArrayLike, t: float
) -> Callable[[ArrayLike], FloatArray]:
    """
    Envelope G on [0, t] bounding |X(s) - Y(s)| until the coupling time.

    Raises:
        InvalidParameterError: If t <= 0

    """
    return CouplingSchedule(kappa1=kappa1, gap=_gap(xi0, eta0), t=t).envelope
