from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import StrEnum
from typing import Any, Callable

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt

Rhs = Callable[[NDArray[Any]], NDArray[Any]]


class Method(StrEnum):
    RK4 = "rk4"
    RK45 = "rk45"


class IntegratorConfig(BaseModel):
    """How a trajectory is stepped and sampled.

    ``dt`` is the fixed step for rk4 and the initial step for rk45; tolerances only
    apply to rk45. ``sample_every`` keeps every k-th accepted step.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: Method = Method.RK45
    dt: PositiveFloat = 5e-3
    rel_tol: PositiveFloat = 1e-9
    abs_tol: PositiveFloat = 1e-9
    t_max: PositiveFloat = 200.0
    sample_every: PositiveInt = 1
    max_steps: PositiveInt = Field(default=10_000_000)


@dataclass
class StepResult:
    """Outcome of one accepted step.

    ``dt`` is the step actually taken; ``dt_next`` is the proposal for the next one.
    """

    y: NDArray[Any]
    dt: float
    dt_next: float
    rejected: int = 0


class Stepper(ABC):
    """Abstract base class for one-step integration schemes.

    Steppers act on any real or complex ndarray, so the Bloch form, the density form
    and tangent-augmented systems share them.
    """

    order: int
    adaptive: bool

    @classmethod
    @abstractmethod
    def from_config(cls, config: IntegratorConfig) -> Stepper:
        pass

    @abstractmethod
    def step(
        self, rhs: Rhs, y: NDArray[Any], dt: float, t: float = 0.0
    ) -> StepResult:
        """Advance ``y`` by ``dt``; ``t`` is the current time, used only for step floors."""


def is_finite(y: NDArray[Any]) -> bool:
    return bool(np.all(np.isfinite(y)))
