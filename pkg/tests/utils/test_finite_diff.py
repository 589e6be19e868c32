"""Tests for cylint.utils.finite_diff."""

import math

import numpy as np
import pytest

from cylint.utils.finite_diff import (
    central_diff,
    central_diff2,
    gradient,
    jacobian,
    mixed_partial,
    scaled_step,
)


class TestScalarDifferences:
    def test_first_derivative(self) -> None:
        assert central_diff(math.sin, 0.3, 1e-3) == pytest.approx(math.cos(0.3), abs=1e-11)

    def test_second_derivative(self) -> None:
        assert central_diff2(math.exp, 0.5, 1e-3) == pytest.approx(math.exp(0.5), abs=1e-8)

    def test_scaled_step(self) -> None:
        assert scaled_step(1e-3, 0.2) == 1e-3
        assert scaled_step(1e-3, -40.0) == pytest.approx(4e-2)


class TestFieldDifferences:
    """Gradients and Jacobians of functions on R^n."""

    def test_gradient_of_quadratic(self) -> None:
        f = lambda x: x[0] ** 2 + 3.0 * x[0] * x[1] - x[2] ** 3
        x = np.array([1.0, 2.0, -0.5])
        expected = np.array([2.0 + 6.0, 3.0, -0.75])
        np.testing.assert_allclose(gradient(f, x, 1e-3), expected, atol=1e-9)

    def test_mixed_partial(self) -> None:
        f = lambda x: math.sin(x[0]) * x[1] ** 2
        x = np.array([0.4, 1.5])
        assert mixed_partial(f, x, 0, 1, 1e-3) == pytest.approx(2 * 1.5 * math.cos(0.4), abs=1e-8)
        assert mixed_partial(f, x, 1, 1, 1e-3) == pytest.approx(2 * math.sin(0.4), abs=1e-8)

    def test_jacobian_rows_are_components(self) -> None:
        fs = lambda x: np.array([x[0] * x[1], x[1] ** 2])
        J = jacobian(fs, np.array([2.0, 3.0]), 1e-3)
        np.testing.assert_allclose(J, [[3.0, 2.0], [0.0, 6.0]], atol=1e-9)
