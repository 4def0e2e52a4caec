"""Integration of ``dr/dt = G(r) r`` in Bloch form and of ``dX/dt`` in density form."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from functools import partial
from typing import Any, Iterator, Sequence

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from lorenz_qubit.base import IntegratorConfig, Method, Rhs, Stepper, is_finite
from lorenz_qubit.errors import NonFiniteStateError, StepLimitError, ValidationError
from lorenz_qubit.generators import GeneratorSpec, TorsionGenerator
from lorenz_qubit.state import (
    MATRIX_TOL,
    PHYSICAL_TOL,
    BlochVector,
    DensityMatrix,
    as_array,
    bloch_components,
    bloch_from_density,
    entropy_of_norm,
    purity_of_norm,
)
from lorenz_qubit.steppers import RK4Stepper, init_stepper

__all__ = [
    "IntegratorConfig",
    "Method",
    "TerminationReason",
    "Trajectory",
    "TrajectorySample",
    "advance",
    "ensemble",
    "integrate_bloch",
    "integrate_density",
    "march",
    "random_ball_seeds",
    "step_rk4",
]


class TerminationReason(StrEnum):
    COMPLETED = "completed"
    MAX_STEPS = "max_steps"
    NONFINITE = "nonfinite"


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    r: BlochVector
    norm: float
    purity: float
    entropy: float
    trace_error: float


@dataclass(eq=False)
class Trajectory:
    """Samples of one run, stored column-wise.

    ``entropy`` is NaN for samples outside the Bloch ball. ``trace_error`` and
    ``hermiticity_error`` are only nonzero for density-form runs.
    """

    t: NDArray[np.float64]
    r: NDArray[np.float64]
    generator: GeneratorSpec
    config: IntegratorConfig
    termination: TerminationReason = TerminationReason.COMPLETED
    trace_error: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    hermiticity_error: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    form: str = "bloch"
    steps: int = 0
    rejected_steps: int = 0

    def __post_init__(self) -> None:
        n = len(self.t)
        if n == 0:
            raise ValidationError("a trajectory holds at least its initial sample")
        if len(self.trace_error) == 0:
            self.trace_error = np.zeros(n)
        if len(self.hermiticity_error) == 0:
            self.hermiticity_error = np.zeros(n)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def norm(self) -> NDArray[np.float64]:
        return np.asarray(np.linalg.norm(self.r, axis=1), dtype=float)

    @property
    def purity(self) -> NDArray[np.float64]:
        return purity_of_norm(self.norm)

    @property
    def entropy(self) -> NDArray[np.float64]:
        return entropy_of_norm(self.norm)

    @property
    def initial(self) -> BlochVector:
        return BlochVector.from_array(self.r[0])

    @property
    def final(self) -> BlochVector:
        return BlochVector.from_array(self.r[-1])

    def samples(self) -> Iterator[TrajectorySample]:
        norm, purity, entropy = self.norm, self.purity, self.entropy
        for i in range(len(self.t)):
            yield TrajectorySample(
                t=float(self.t[i]),
                r=BlochVector.from_array(self.r[i]),
                norm=float(norm[i]),
                purity=float(purity[i]),
                entropy=float(entropy[i]),
                trace_error=float(self.trace_error[i]),
            )

    def after(self, transient: float) -> NDArray[np.bool_]:
        return self.t >= transient


@dataclass(frozen=True)
class MarchStep:
    t: float
    y: NDArray[Any]
    dt_next: float
    rejected: int


def march(
    stepper: Stepper,
    rhs: Rhs,
    y0: NDArray[Any],
    duration: float,
    dt: float,
    max_steps: int,
) -> Iterator[MarchStep]:
    """Yield every accepted step from ``t = 0`` to ``t = duration``.

    Fixed-step schemes land on ``k * dt``, with a shortened last step when ``dt`` does
    not divide ``duration``. Raises ``NonFiniteStateError`` before yielding a non-finite
    state and ``StepLimitError`` once ``max_steps`` accepted steps did not suffice.
    """
    y = y0
    if not stepper.adaptive:
        n = max(1, math.ceil(duration / dt - 1e-9))
        for k in range(1, n + 1):
            if k > max_steps:
                raise StepLimitError(f"{max_steps} steps reached before t={duration}")
            remaining = duration - (k - 1) * dt
            h = dt if k < n or abs(remaining - dt) <= 1e-9 * dt else remaining
            y = stepper.step(rhs, y, h).y
            if not is_finite(y):
                raise NonFiniteStateError(f"non-finite state at t={(k - 1) * dt + h:g}")
            yield MarchStep(t=duration if k == n else k * dt, y=y, dt_next=dt, rejected=0)
        return

    t, k, h = 0.0, 0, dt
    while t < duration:
        if k >= max_steps:
            raise StepLimitError(f"{max_steps} steps reached at t={t:g}")
        remaining = duration - t
        clamped = h >= remaining
        result = stepper.step(rhs, y, remaining if clamped else h, t=t)
        if not is_finite(result.y):
            raise NonFiniteStateError(f"non-finite state at t={t + result.dt:g}")
        k += 1
        y = result.y
        finished = clamped and result.dt == remaining
        t = duration if finished else t + result.dt
        # A clamped final step would otherwise shrink the proposal for the next call.
        h = h if finished else result.dt_next
        yield MarchStep(t=t, y=y, dt_next=h, rejected=result.rejected)


def advance(
    stepper: Stepper,
    rhs: Rhs,
    y0: NDArray[Any],
    duration: float,
    dt: float,
    max_steps: int,
) -> tuple[NDArray[Any], float]:
    """State after ``duration`` and the step proposal to continue with."""
    y, h = y0, dt
    for s in march(stepper, rhs, y0, duration, dt, max_steps):
        y, h = s.y, s.dt_next
    return y, h


def step_rk4(gen: TorsionGenerator, r: BlochVector | Any, dt: float) -> BlochVector:
    """One classical RK4 step of ``G(r) r``."""
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    y = RK4Stepper().step(gen.flow, as_array(r), dt).y
    if not is_finite(y):
        raise NonFiniteStateError(f"RK4 step from {r} produced {y}")
    return BlochVector.from_array(y)


def density_rhs(gen: TorsionGenerator) -> Rhs:
    """``dX/dt = (sigma^a / 2) f_a(r(X))``; the increment is traceless and Hermitian."""

    def rhs(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
        fx, fy, fz = gen.flow(bloch_components(m).real)
        return np.array(
            [[fz / 2, complex(fx, -fy) / 2], [complex(fx, fy) / 2, -fz / 2]],
            dtype=complex,
        )

    return rhs


def integrate_bloch(
    gen: TorsionGenerator, r0: BlochVector | Any, cfg: IntegratorConfig
) -> Trajectory:
    y0 = as_array(r0)
    if not is_finite(y0):
        raise ValidationError(f"initial state must be finite, got {r0}")
    return _collect(gen, gen.flow, y0, cfg, form="bloch")


def integrate_density(
    gen: TorsionGenerator, x0: DensityMatrix, cfg: IntegratorConfig
) -> Trajectory:
    trace_error = abs(x0.trace - 1.0)
    if trace_error > MATRIX_TOL:
        raise ValidationError(f"initial density matrix has trace error {trace_error:.3e}")
    bloch_from_density(x0)
    return _collect(
        gen, density_rhs(gen), np.array(x0.matrix, dtype=complex), cfg, form="density"
    )


def ensemble(
    gen: TorsionGenerator,
    seeds: Sequence[BlochVector | Any],
    cfg: IntegratorConfig,
    workers: int = 1,
) -> list[Trajectory]:
    """Independent trajectories, one per seed, in seed order."""
    if not seeds:
        raise ValidationError("ensemble needs at least one seed")
    run = partial(_integrate_seed, gen, cfg)
    if workers <= 1 or len(seeds) == 1:
        trajectories = [run(seed) for seed in seeds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(run, seeds))

    incomplete = sum(t.termination != TerminationReason.COMPLETED for t in trajectories)
    if incomplete:
        logger.warning(f"{incomplete}/{len(trajectories)} trajectories did not complete")
    return trajectories


def random_ball_seeds(count: int, radius: float, rng_seed: int) -> list[BlochVector]:
    """Points uniform in the ball of ``radius``, from a counter-based generator."""
    if count < 1:
        raise ValidationError(f"seed count must be positive, got {count}")
    if not 0 < radius <= 1:
        raise ValidationError(f"ensemble radius must lie in (0, 1], got {radius}")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    directions = rng.standard_normal((count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(count) ** (1 / 3)
    return [BlochVector.from_array(p) for p in directions * radii[:, None]]


def _integrate_seed(
    gen: TorsionGenerator, cfg: IntegratorConfig, seed: BlochVector
) -> Trajectory:
    return integrate_bloch(gen, seed, cfg)


def _collect(
    gen: TorsionGenerator,
    rhs: Rhs,
    y0: NDArray[Any],
    cfg: IntegratorConfig,
    form: str,
) -> Trajectory:
    density = form == "density"
    stepper = init_stepper(cfg)
    times = [0.0]
    states = [y0]
    termination = TerminationReason.COMPLETED
    steps = rejected = 0
    last: MarchStep | None = None

    try:
        for steps, s in enumerate(
            march(stepper, rhs, y0, cfg.t_max, cfg.dt, cfg.max_steps), start=1
        ):
            rejected += s.rejected
            last = s
            if steps % cfg.sample_every == 0:
                times.append(s.t)
                states.append(s.y)
    except NonFiniteStateError as e:
        logger.debug(f"trajectory truncated: {e}")
        termination = TerminationReason.NONFINITE
    except StepLimitError as e:
        logger.debug(f"trajectory truncated: {e}")
        termination = TerminationReason.MAX_STEPS

    if last is not None and times[-1] != last.t:
        times.append(last.t)
        states.append(last.y)

    if density:
        stack = np.asarray(states, dtype=complex)
        r = np.stack(
            [
                (stack[:, 0, 1] + stack[:, 1, 0]).real,
                (1j * (stack[:, 0, 1] - stack[:, 1, 0])).real,
                (stack[:, 0, 0] - stack[:, 1, 1]).real,
            ],
            axis=1,
        )
        trace_error = np.abs(stack[:, 0, 0] + stack[:, 1, 1] - 1.0)
        hermiticity = np.max(
            np.abs(stack - np.conj(np.transpose(stack, (0, 2, 1)))), axis=(1, 2)
        )
    else:
        r = np.asarray(states, dtype=float)
        trace_error = np.zeros(len(times))
        hermiticity = np.zeros(len(times))

    traj = Trajectory(
        t=np.asarray(times, dtype=float),
        r=r,
        generator=gen.to_spec(),
        config=cfg,
        termination=termination,
        trace_error=trace_error,
        hermiticity_error=hermiticity,
        form=form,
        steps=steps,
        rejected_steps=rejected,
    )
    max_norm = float(np.max(traj.norm))
    logger.debug(
        f"{form} trajectory: {steps} steps ({rejected} rejected), "
        f"{len(traj)} samples, max |r| = {max_norm:.6f}, {termination}"
    )
    if max_norm > 1.0 + PHYSICAL_TOL:
        logger.debug(f"unphysical excursion: max |r| = {max_norm:.6f}")
    return traj
