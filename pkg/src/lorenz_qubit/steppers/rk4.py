from __future__ import annotations

from typing import Any

from numpy.typing import NDArray

from lorenz_qubit.base import IntegratorConfig, Rhs, StepResult, Stepper


class RK4Stepper(Stepper):
    """Classical fourth-order Runge-Kutta with a fixed step."""

    order = 4
    adaptive = False

    @classmethod
    def from_config(cls, config: IntegratorConfig) -> RK4Stepper:
        return cls()

    def step(
        self, rhs: Rhs, y: NDArray[Any], dt: float, t: float = 0.0
    ) -> StepResult:
        k1 = rhs(y)
        k2 = rhs(y + (dt / 2) * k1)
        k3 = rhs(y + (dt / 2) * k2)
        k4 = rhs(y + dt * k3)
        y_next = y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        return StepResult(y=y_next, dt=dt, dt_next=dt)
