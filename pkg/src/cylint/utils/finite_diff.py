"""Fourth-order central finite differences on scalar and vector arguments."""

from typing import Callable

import numpy as np

ScalarFn = Callable[[float], float]
FieldFn = Callable[[np.ndarray], float]


def scaled_step(h: float, x: float) -> float:
    """Step h scaled by max(1, |x|)."""
    return h * max(1.0, abs(x))


def central_diff(f: ScalarFn, x: float, h: float) -> float:
    """First derivative, error O(h^4)."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def central_diff2(f: ScalarFn, x: float, h: float) -> float:
    """Second derivative, error O(h^4)."""
    return (
        -f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)
    ) / (12 * h * h)


def partial(f: FieldFn, x: np.ndarray, i: int, h: float) -> float:
    """Partial derivative of f along axis i at x."""
    e = np.zeros_like(x, dtype=float)
    e[i] = 1.0
    return central_diff(lambda t: f(x + t * e), 0.0, h)


def gradient(f: FieldFn, x: np.ndarray, h: float, scale: bool = True) -> np.ndarray:
    """Gradient of f at x; each step is scaled by max(1, |x_i|) when scale is set."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for i in range(x.size):
        hi = scaled_step(h, x[i]) if scale else h
        out[i] = partial(f, x, i, hi)
    return out


def mixed_partial(f: FieldFn, x: np.ndarray, i: int, j: int, h: float) -> float:
    """Second partial derivative d^2 f / dx_i dx_j at x."""
    x = np.asarray(x, dtype=float)
    if i == j:
        e = np.zeros_like(x)
        e[i] = 1.0
        return central_diff2(lambda t: f(x + t * e), 0.0, h)
    ej = np.zeros_like(x)
    ej[j] = 1.0
    return central_diff(lambda t: partial(f, x + t * ej, i, h), 0.0, h)


def jacobian(fs: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    """Jacobian of a vector-valued function; rows are components, columns axes."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        hi = scaled_step(h, x[i])
        e[i] = hi
        d = (
            -fs(x + 2 * e) + 8 * fs(x + e) - 8 * fs(x - e) + fs(x - 2 * e)
        ) / (12 * hi)
        cols.append(np.asarray(d, dtype=float))
    return np.column_stack(cols)
