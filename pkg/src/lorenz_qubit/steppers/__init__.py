from __future__ import annotations

from lorenz_qubit.base import IntegratorConfig, Method, StepResult, Stepper
from lorenz_qubit.errors import ValidationError

from .dopri import DormandPrinceStepper
from .rk4 import RK4Stepper

__all__ = [
    "DormandPrinceStepper",
    "IntegratorConfig",
    "Method",
    "RK4Stepper",
    "StepResult",
    "Stepper",
    "init_stepper",
]


def init_stepper(config: IntegratorConfig) -> Stepper:
    method = str(config.method).lower()
    steppers: dict[str, type[Stepper]] = {
        Method.RK4.value: RK4Stepper,
        Method.RK45.value: DormandPrinceStepper,
    }
    if method not in steppers:
        raise ValidationError(
            f"method must be one of {list(steppers.keys())}, got '{method}'"
        )
    return steppers[method].from_config(config)
