from __future__ import annotations

from typing import Any

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from lorenz_qubit.base import IntegratorConfig, Rhs, StepResult, Stepper
from lorenz_qubit.errors import NonFiniteStateError

# Dormand-Prince 5(4) tableau.
_A: tuple[tuple[float, ...], ...] = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6] + (0.0,)
# Fifth-order minus embedded fourth-order weights.
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
# Steps below MIN_STEP * max(1, |t|) are lost in the rounding of t.
MIN_STEP = 1e-14
MAX_REJECTIONS = 200


class DormandPrinceStepper(Stepper):
    """Embedded 5(4) pair with proportional step-size control.

    The fifth-order solution is propagated; the difference to the embedded fourth-order
    one is the local error estimate, accepted when
    ``|err| <= max(abs_tol, rel_tol * |y|)``.
    """

    order = 5
    adaptive = True

    @classmethod
    def from_config(cls, config: IntegratorConfig) -> DormandPrinceStepper:
        return cls(rel_tol=config.rel_tol, abs_tol=config.abs_tol)

    def __init__(self, rel_tol: float, abs_tol: float):
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol

    def step(
        self, rhs: Rhs, y: NDArray[Any], dt: float, t: float = 0.0
    ) -> StepResult:
        rejected = 0
        floor = MIN_STEP * max(1.0, abs(t))
        while True:
            if dt < floor:
                raise NonFiniteStateError(f"step size collapsed to {dt:.3e} at t={t:g}")
            y_next, error = self._attempt(rhs, y, dt)
            scale = max(
                self.abs_tol,
                self.rel_tol
                * max(float(np.linalg.norm(y)), float(np.linalg.norm(y_next))),
            )
            ratio = error / scale if np.isfinite(error) else np.inf
            if ratio <= 1.0:
                factor = (
                    MAX_FACTOR
                    if ratio == 0.0
                    else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * ratio**-0.2))
                )
                return StepResult(
                    y=y_next, dt=dt, dt_next=dt * factor, rejected=rejected
                )

            rejected += 1
            if rejected > MAX_REJECTIONS:
                raise NonFiniteStateError(
                    f"{rejected} consecutive step rejections at dt={dt:.3e}"
                )
            factor = (
                max(MIN_FACTOR, SAFETY * ratio**-0.2)
                if np.isfinite(ratio)
                else MIN_FACTOR
            )
            logger.trace(f"rejected step dt={dt:.3e} (error ratio {ratio:.3e})")
            dt *= factor

    @staticmethod
    def _attempt(rhs: Rhs, y: NDArray[Any], dt: float) -> tuple[NDArray[Any], float]:
        k: list[NDArray[Any]] = []
        for row in _A:
            stage = y
            for a, kj in zip(row, k):
                if a:
                    stage = stage + (dt * a) * kj
            k.append(rhs(stage))
        y_next = y
        for b, ki in zip(_B, k):
            if b:
                y_next = y_next + (dt * b) * ki
        # The last stage is f(y_next) because the final tableau row equals _B.
        err = sum((dt * e) * ki for e, ki in zip(_E, k) if e)
        return y_next, float(np.linalg.norm(err))
