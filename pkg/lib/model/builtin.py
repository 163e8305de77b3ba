"""Registry of built-in models with analytically derived hypothesis constants."""

import inspect
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from lib.errors import InvalidModelError, UnknownModelError
from lib.model.spec import ModelSpec, zero_delay_drift

FloatArray = NDArray[np.float64]

DEFAULT_R0 = 0.2
DEFAULT_DELTA = 0.05


def derived_constants(
    *, kappa1: float, lipschitz_z: float, delay_gain: float, kappa: float, r0: float, delta: float
) -> tuple[float, float]:
    """
    Hypothesis constants for Z with one-sided constant kappa1 and b(xi) = B xi(-r0).

    lambda1 = 2 kappa1 - |B| - L1 kappa r0 - delta
    lambda2 = |B| + L1 kappa r0 + 2 |B| kappa r0 + delta

    Returns:
        Tuple (lambda1, lambda2)

    """
    neutral = lipschitz_z * kappa * r0
    lambda1 = 2.0 * kappa1 - delay_gain - neutral - delta
    lambda2 = delay_gain + neutral + 2.0 * delay_gain * kappa * r0 + delta
    return lambda1, lambda2


def diffusion_matrix(sigma: float | ArrayLike, dim: int) -> FloatArray:
    """Scalar sigma becomes sigma * I; matrices pass through."""
    matrix = np.asarray(sigma, dtype=np.float64)
    if matrix.ndim == 0:
        return float(matrix) * np.eye(dim)
    return matrix


def _check_constants(name: str, lambda1: float, lambda2: float) -> None:
    if not lambda1 > lambda2:
        raise InvalidModelError(
            f"parameters of '{name}' give lambda1={lambda1:.4g} <= lambda2={lambda2:.4g}"
        )


def ornstein(
    *,
    a: float = 1.0,
    sigma: float | ArrayLike = 1.0,
    r0: float = DEFAULT_R0,
    dim: int = 1,
    delta: float = DEFAULT_DELTA,
) -> ModelSpec:
    """Ornstein-Uhlenbeck: Z(x) = -a x, b == 0, kappa = 0."""
    lambda1, lambda2 = derived_constants(
        kappa1=a, lipschitz_z=a, delay_gain=0.0, kappa=0.0, r0=r0, delta=delta
    )
    _check_constants("ornstein", lambda1, lambda2)
    return ModelSpec(
        dim=dim,
        kappa=0.0,
        r0=r0,
        drift_z=lambda x: -a * x,
        drift_b=zero_delay_drift,
        sigma=diffusion_matrix(sigma, dim),
        L1=a,
        L2=0.0,
        lambda1=lambda1,
        lambda2=lambda2,
        kappa1=a,
        name="ornstein",
        parameters={"a": a, "sigma": sigma, "r0": r0, "dim": dim, "delta": delta},
    )


def scalar_linear(  # noqa: PLR0913
    *,
    a: float = 6.0,
    beta: float = 0.1,
    kappa: float = 0.05,
    r0: float = DEFAULT_R0,
    sigma: float | ArrayLike = 1.0,
    dim: int = 1,
    delta: float = DEFAULT_DELTA,
) -> ModelSpec:
    """Linear drift with a point delay: Z(x) = -a x, b(xi) = beta xi(-r0)."""
    lambda1, lambda2 = derived_constants(
        kappa1=a, lipschitz_z=a, delay_gain=abs(beta), kappa=kappa, r0=r0, delta=delta
    )
    _check_constants("scalar_linear", lambda1, lambda2)
    return ModelSpec(
        dim=dim,
        kappa=kappa,
        r0=r0,
        drift_z=lambda x: -a * x,
        drift_b=lambda window, _h: beta * window[..., 0, :],
        sigma=diffusion_matrix(sigma, dim),
        L1=a,
        L2=abs(beta),
        lambda1=lambda1,
        lambda2=lambda2,
        kappa1=a,
        name="scalar_linear",
        parameters={
            "a": a,
            "beta": beta,
            "kappa": kappa,
            "r0": r0,
            "sigma": sigma,
            "dim": dim,
            "delta": delta,
        },
    )


def cubic(  # noqa: PLR0913
    *,
    a: float = 1.0,
    beta: float = 0.0,
    kappa: float = 0.0,
    r0: float = DEFAULT_R0,
    sigma: float | ArrayLike = 1.0,
    dim: int = 1,
    radius: float = 2.0,
    delta: float = DEFAULT_DELTA,
) -> ModelSpec:
    """
    Cubic drift Z(x) = -|x|^2 x - a x with b(xi) = beta xi(-r0).

    The cubic term only strengthens dissipativity, so kappa1 = a. Z is not globally
    Lipschitz: L1 = a + 3 radius^2 holds on the ball of the given radius.
    """
    lipschitz_z = a + 3.0 * radius * radius
    lambda1, lambda2 = derived_constants(
        kappa1=a, lipschitz_z=lipschitz_z, delay_gain=abs(beta), kappa=kappa, r0=r0, delta=delta
    )
    _check_constants("cubic", lambda1, lambda2)

    def drift_z(x: FloatArray) -> FloatArray:
        return -np.sum(x * x, axis=-1, keepdims=True) * x - a * x

    return ModelSpec(
        dim=dim,
        kappa=kappa,
        r0=r0,
        drift_z=drift_z,
        drift_b=lambda window, _h: beta * window[..., 0, :],
        sigma=diffusion_matrix(sigma, dim),
        L1=lipschitz_z,
        L2=abs(beta),
        lambda1=lambda1,
        lambda2=lambda2,
        kappa1=a,
        name="cubic",
        parameters={
            "a": a,
            "beta": beta,
            "kappa": kappa,
            "r0": r0,
            "sigma": sigma,
            "dim": dim,
            "radius": radius,
            "delta": delta,
        },
    )


def linear_system(  # noqa: PLR0913
    *,
    drift_matrix: ArrayLike,
    delay_matrix: ArrayLike | None = None,
    sigma: float | ArrayLike = 1.0,
    kappa: float = 0.0,
    r0: float = DEFAULT_R0,
    delta: float = DEFAULT_DELTA,
    constants: Mapping[str, float] | None = None,
) -> ModelSpec:
    """
    Linear model Z(x) = A x, b(xi) = B xi(-r0) from a coefficient table.

    Constants not given in ``constants`` are derived: L1 = ||A||, L2 = ||B||,
    kappa1 = -lambda_max((A + A^T) / 2), then lambda1 and lambda2 as for the built-ins.
    """
    a_matrix = np.atleast_2d(np.asarray(drift_matrix, dtype=np.float64))
    dim = a_matrix.shape[0]
    b_matrix = (
        np.zeros((dim, dim))
        if delay_matrix is None
        else np.atleast_2d(np.asarray(delay_matrix, dtype=np.float64))
    )
    if a_matrix.shape != (dim, dim) or b_matrix.shape != (dim, dim):
        raise InvalidModelError("drift_matrix and delay_matrix must be square and of equal size")
    declared = dict(constants or {})
    lipschitz_z = declared.get("L1", float(np.linalg.norm(a_matrix, 2)))
    delay_gain = declared.get("L2", float(np.linalg.norm(b_matrix, 2)))
    kappa1 = declared.get("kappa1", float(-np.max(np.linalg.eigvalsh((a_matrix + a_matrix.T) / 2))))
    lambda1, lambda2 = derived_constants(
        kappa1=kappa1,
        lipschitz_z=lipschitz_z,
        delay_gain=delay_gain,
        kappa=kappa,
        r0=r0,
        delta=delta,
    )
    lambda1 = declared.get("lambda1", lambda1)
    lambda2 = declared.get("lambda2", lambda2)
    _check_constants("linear_system", lambda1, lambda2)
    return ModelSpec(
        dim=dim,
        kappa=kappa,
        r0=r0,
        drift_z=lambda x: x @ a_matrix.T,
        drift_b=lambda window, _h: window[..., 0, :] @ b_matrix.T,
        sigma=diffusion_matrix(sigma, dim),
        L1=lipschitz_z,
        L2=delay_gain,
        lambda1=lambda1,
        lambda2=lambda2,
        kappa1=kappa1,
        name="linear_system",
        parameters={
            "drift_matrix": a_matrix.tolist(),
            "delay_matrix": b_matrix.tolist(),
            "kappa": kappa,
            "r0": r0,
            "delta": delta,
        },
    )


@dataclass(frozen=True)
class ModelInfo:
    """Registry entry of a built-in model."""

    name: str
    description: str
    builder: Callable[..., ModelSpec]

    def defaults(self) -> dict[str, Any]:
        """Parameter names with their defaults (required parameters map to None)."""
        signature = inspect.signature(self.builder)
        return {
            name: (None if parameter.default is inspect.Parameter.empty else parameter.default)
            for name, parameter in signature.parameters.items()
        }


MODELS: dict[str, ModelInfo] = {
    info.name: info
    for info in (
        ModelInfo("cubic", "Z(x) = -|x|^2 x - a x, b(xi) = beta xi(-r0)", cubic),
        ModelInfo("linear_system", "Z(x) = A x, b(xi) = B xi(-r0) from matrices", linear_system),
        ModelInfo("ornstein", "Z(x) = -a x, b = 0, kappa = 0", ornstein),
        ModelInfo("scalar_linear", "Z(x) = -a x, b(xi) = beta xi(-r0)", scalar_linear),
    )
}


def list_models() -> list[ModelInfo]:
    """Registered models in stable (alphabetical) order."""
    return [MODELS[name] for name in sorted(MODELS)]


def builtin_model(name: str, parameters: Mapping[str, Any] | None = None) -> ModelSpec:
    """
    Build a registered model.

    Args:
        name: Registry name
        parameters: Keyword parameters of the model builder

    Returns:
        Fully populated ModelSpec

    Raises:
        UnknownModelError: If the name is not registered
        InvalidModelError: If a parameter is unknown or the constants are inconsistent

    """
    if name not in MODELS:
        raise UnknownModelError(name, sorted(MODELS))
    info = MODELS[name]
    parameters = dict(parameters or {})
    unknown = sorted(set(parameters) - set(info.defaults()))
    if unknown:
        raise InvalidModelError(f"unknown parameters for '{name}': {unknown}")
    try:
        return info.builder(**parameters)
    except TypeError as e:
        raise InvalidModelError(f"invalid parameters for '{name}': {e}") from e
