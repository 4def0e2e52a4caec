"""Tests for the classical Runge-Kutta stepper."""

import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import solve_ivp

sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from lorenz_qubit.base import Rhs
from lorenz_qubit.generators import lor63_generator
from lorenz_qubit.steppers import RK4Stepper


def integrate(rhs: Rhs, y0: np.ndarray, dt: float, t_end: float) -> np.ndarray:
    stepper = RK4Stepper()
    y = y0
    for _ in range(round(t_end / dt)):
        y = stepper.step(rhs, y, dt).y
    return y


class TestRK4Stepper:
    def test_exact_for_cubic_in_time(self) -> None:
        """Quadrature of 3 s^2 along s' = 1 is exact, as with Simpson's rule."""

        def rhs(y: np.ndarray) -> np.ndarray:
            return np.array([1.0, 3 * y[0] ** 2])

        y = RK4Stepper().step(rhs, np.array([0.0, 0.0]), 0.5).y
        np.testing.assert_allclose(y, [0.5, 0.125], rtol=1e-15)

    def test_fixed_step_reported(self) -> None:
        result = RK4Stepper().step(lambda y: -y, np.array([1.0]), 0.1)
        assert result.dt == result.dt_next == 0.1
        assert result.rejected == 0

    def test_complex_state(self) -> None:
        """Density-form states are complex matrices."""
        y0 = np.array([[1.0, 1j], [-1j, 0.0]])
        y = integrate(lambda y: 1j * y, y0, 0.01, 1.0)
        np.testing.assert_allclose(y, y0 * np.exp(1j), rtol=1e-9)

    def test_global_order_on_lor63(self) -> None:
        """Error ratio under dt halving is close to 2^4."""
        gen = lor63_generator()
        y0 = np.array([0.12, 0.12, 0.3])
        reference = solve_ivp(
            lambda _t, y: gen.flow(y),
            (0.0, 1.0),
            y0,
            method="DOP853",
            rtol=1e-13,
            atol=1e-15,
        ).y[:, -1]
        coarse = np.linalg.norm(integrate(gen.flow, y0, 0.01, 1.0) - reference)
        fine = np.linalg.norm(integrate(gen.flow, y0, 0.005, 1.0) - reference)
        assert 14.0 <= coarse / fine <= 18.0

    @pytest.mark.parametrize("dt", [0.1, 0.05])
    def test_decay_accuracy(self, dt: float) -> None:
        y = integrate(lambda y: -y, np.array([1.0]), dt, 1.0)
        assert abs(y[0] - np.exp(-1.0)) < dt**4
