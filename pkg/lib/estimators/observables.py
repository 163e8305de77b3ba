"""Segment observables f(phi) evaluated on batches of windows.

An observable maps windows shaped (..., m+1, n) to values shaped (...). The registry
below is what experiment files refer to by name.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from lib.errors import InvalidObservableError
from lib.segment import sup_norm

FloatArray = NDArray[np.float64]
ObservableFn = Callable[[FloatArray], FloatArray]


@dataclass(frozen=True)
class Observable:
    """Named observable with the properties the estimators rely on."""

    name: str
    fn: ObservableFn
    bounded: bool = True
    nonnegative: bool = True

    def __call__(self, windows: FloatArray) -> FloatArray:
        return np.asarray(self.fn(windows), dtype=np.float64)

    def require(self, *, bounded: bool = False, nonnegative: bool = False) -> None:
        """
        Raises:
            InvalidObservableError: If a required property is not declared

        """
        if bounded and not self.bounded:
            raise InvalidObservableError(f"observable '{self.name}' must be bounded")
        if nonnegative and not self.nonnegative:
            raise InvalidObservableError(f"observable '{self.name}' must be nonnegative")


def _head(windows: FloatArray) -> FloatArray:
    return np.linalg.norm(windows[..., -1, :], axis=-1)


def constant(value: float = 1.0) -> Observable:
    return Observable(
        name="constant",
        fn=lambda windows: np.full(windows.shape[:-2], value),
        nonnegative=value >= 0,
    )


def capped_head_norm(cap: float = 1.0) -> Observable:
    """1 ∧ |phi(0)| (with a configurable cap)."""
    return Observable(name="capped_head_norm", fn=lambda windows: np.minimum(cap, _head(windows)))


def capped_sup_norm(cap: float = 1.0) -> Observable:
    """cap ∧ ||phi||_inf."""
    return Observable(name="capped_sup_norm", fn=lambda windows: np.minimum(cap, sup_norm(windows)))


def bounded_head(scale: float = 1.0) -> Observable:
    """scale * clip(phi(0)_0, -1, 1); signed, so not usable where f >= 0 is required."""
    return Observable(
        name="bounded_head",
        fn=lambda windows: scale * np.clip(windows[..., -1, 0], -1.0, 1.0),
        nonnegative=False,
    )


def cosine_head(frequency: float = 1.0) -> Observable:
    """(1 + cos(frequency * phi(0)_0)) / 2."""
    return Observable(
        name="cosine_head",
        fn=lambda windows: 0.5 * (1.0 + np.cos(frequency * windows[..., -1, 0])),
    )


def tail_indicator(threshold: float = 1.0) -> Observable:
    """1{|phi(0)| > threshold}."""
    return Observable(
        name="tail_indicator",
        fn=lambda windows: (_head(windows) > threshold).astype(np.float64),
    )


def capped_mean(cap: float = 1.0) -> Observable:
    """cap ∧ |average of phi over the window|."""
    return Observable(
        name="capped_mean",
        fn=lambda windows: np.minimum(cap, np.linalg.norm(windows.mean(axis=-2), axis=-1)),
    )


OBSERVABLES: dict[str, Callable[..., Observable]] = {
    "bounded_head": bounded_head,
    "capped_head_norm": capped_head_norm,
    "capped_mean": capped_mean,
    "capped_sup_norm": capped_sup_norm,
    "constant": constant,
    "cosine_head": cosine_head,
    "tail_indicator": tail_indicator,
}


def list_observables() -> list[str]:
    return sorted(OBSERVABLES)


def build_observable(name: str, params: dict[str, Any] | None = None) -> Observable:
    """
    Build a registered observable.

    Raises:
        InvalidObservableError: If the name is unknown or the parameters do not fit

    """
    if name not in OBSERVABLES:
        raise InvalidObservableError(
            f"unknown observable '{name}', available: {', '.join(list_observables())}"
        )
    try:
        return OBSERVABLES[name](**(params or {}))
    except TypeError as e:
        raise InvalidObservableError(f"bad parameters for observable '{name}': {e}") from e
