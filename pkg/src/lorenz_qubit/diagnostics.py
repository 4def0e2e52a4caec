"""Dynamical-systems diagnostics on generators and trajectories.

Results are pydantic models tagged with ``kind`` so a report can hold any mix of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import Any, Literal, Sequence

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict

from lorenz_qubit.base import IntegratorConfig, Rhs
from lorenz_qubit.errors import (
    ConvergenceError,
    DegenerateStepError,
    NonFiniteStateError,
    ValidationError,
)
from lorenz_qubit.generators import Axis, GPParams, Lor63Params, TorsionGenerator
from lorenz_qubit.integrate import Trajectory, advance
from lorenz_qubit.state import PHYSICAL_TOL, BlochVector, as_array
from lorenz_qubit.steppers import init_stepper

DEGENERATE_RE = 1e-8
MAX_HALVINGS = 40
SINGULAR_COND = 1e14


class Classification(StrEnum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


class _Result(BaseModel):
    model_config = ConfigDict(frozen=True)


class FixedPoint(_Result):
    kind: Literal["fixed_point"] = "fixed_point"
    r_star: BlochVector
    residual: float
    eigenvalues_real: list[float]
    eigenvalues_imag: list[float]
    classification: Classification
    iterations: int = 0

    @property
    def eigenvalues(self) -> NDArray[np.complex128]:
        return np.array(self.eigenvalues_real) + 1j * np.array(self.eigenvalues_imag)


class LyapunovResult(_Result):
    """Benettin estimate; ``exponents`` is only set by the full-spectrum variant."""

    kind: Literal["lyapunov"] = "lyapunov"
    lambda_max: float
    running_estimates: list[tuple[float, float]]
    renorm_interval: float
    total_time: float
    transient: float
    spread: float
    exponents: list[float] | None = None


class LobeStats(_Result):
    kind: Literal["lobe_stats"] = "lobe_stats"
    axis: Axis
    threshold: float
    switch_times: list[float]
    residence_durations: list[float]
    switch_count: int

    def coefficient_of_variation(self) -> float:
        if len(self.residence_durations) < 2:
            return float("nan")
        d = np.asarray(self.residence_durations)
        return float(np.std(d) / np.mean(d))


class ConservationDrift(_Result):
    kind: Literal["conservation"] = "conservation"
    quantity: str
    initial: float
    max_drift: float


class ContainmentSummary(_Result):
    kind: Literal["containment"] = "containment"
    transient: float
    trajectories: int
    max_norm: float | None
    unphysical_samples: int
    contained: bool


class EntropySummary(_Result):
    kind: Literal["entropy"] = "entropy"
    min_entropy: float | None
    max_entropy: float | None
    decreasing_fraction: float
    unphysical_samples: int


DiagnosticResult = (
    FixedPoint
    | LyapunovResult
    | LobeStats
    | ConservationDrift
    | ContainmentSummary
    | EntropySummary
)


def classify(eigenvalues: NDArray[np.complex128]) -> Classification:
    re = eigenvalues.real
    if np.any(np.abs(re) < DEGENERATE_RE):
        return Classification.DEGENERATE
    if np.all(re < 0):
        return Classification.STABLE
    if np.all(re > 0):
        return Classification.UNSTABLE
    return Classification.SADDLE


def newton_fixed_point(
    gen: TorsionGenerator,
    guess: BlochVector | Any,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> FixedPoint:
    """Root of ``G(r) r`` by damped Newton iteration from ``guess``.

    A step that does not lower the residual is halved up to 40 times; a singular
    Jacobian falls back to a least-squares step.
    """
    if tol <= 0:
        raise ValidationError(f"Newton tolerance must be positive, got {tol}")
    r = as_array(guess).copy()
    f = gen.flow(r)
    residual = float(np.linalg.norm(f))
    iterations = 0

    while residual > tol:
        if iterations >= max_iter:
            raise ConvergenceError(
                f"Newton did not converge in {max_iter} iterations",
                best=BlochVector.from_array(r),
                residual=residual,
            )
        iterations += 1
        jac = gen.flow_jacobian(r)
        try:
            step = _newton_step(jac, f)
        except DegenerateStepError:
            logger.debug(f"singular Jacobian at {r}, using least-squares step")
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]

        damping = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = r + damping * step
            f_candidate = gen.flow(candidate)
            res_candidate = float(np.linalg.norm(f_candidate))
            if np.isfinite(res_candidate) and res_candidate < residual:
                break
            damping /= 2
        else:
            raise ConvergenceError(
                "Newton stalled: no damped step lowers the residual",
                best=BlochVector.from_array(r),
                residual=residual,
            )
        r, f, residual = candidate, f_candidate, res_candidate
        logger.trace(f"newton iter {iterations}: residual {residual:.3e}")

    eigenvalues = np.linalg.eigvals(gen.flow_jacobian(r))
    eigenvalues = eigenvalues[np.lexsort((eigenvalues.imag, eigenvalues.real))]
    return FixedPoint(
        r_star=BlochVector.from_array(r),
        residual=residual,
        eigenvalues_real=[float(v) for v in eigenvalues.real],
        eigenvalues_imag=[float(v) for v in eigenvalues.imag],
        classification=classify(eigenvalues),
        iterations=iterations,
    )


def _newton_step(jac: NDArray[np.float64], f: NDArray[np.float64]) -> NDArray[np.float64]:
    if np.linalg.cond(jac) > SINGULAR_COND:
        raise DegenerateStepError("Jacobian is numerically singular")
    return np.asarray(np.linalg.solve(jac, -f), dtype=float)


def default_guesses(gen: TorsionGenerator) -> list[BlochVector]:
    """Origin plus, for Lor63 with rho > 1, a guess near each of C+ and C-."""
    guesses = [BlochVector(0.0, 0.0, 0.0)]
    p = gen.params
    if isinstance(p, Lor63Params) and p.rho > 1:
        x, z = 0.9 * p.fixed_point_x, 0.9 * (p.rho - 1) / p.g
        guesses += [BlochVector(x, x, z), BlochVector(-x, -x, z)]
    return guesses


def fixed_point_scan(
    gen: TorsionGenerator,
    guesses: Sequence[BlochVector | Any] | None = None,
    tol: float = 1e-12,
    max_iter: int = 50,
    distinct: float = 1e-8,
) -> list[FixedPoint]:
    """Newton from every guess, keeping distinct converged points in guess order."""
    found: list[FixedPoint] = []
    for guess in guesses if guesses is not None else default_guesses(gen):
        try:
            fp = newton_fixed_point(gen, guess, tol=tol, max_iter=max_iter)
        except ConvergenceError as e:
            logger.warning(f"no fixed point from guess {guess}: {e}")
            continue
        if all(
            np.linalg.norm(fp.r_star.array - other.r_star.array) > distinct
            for other in found
        ):
            found.append(fp)
    return found


def _tangent_rhs(gen: TorsionGenerator, k: int) -> Rhs:
    def rhs(y: NDArray[np.float64]) -> NDArray[np.float64]:
        r = y[:3]
        basis = y[3:].reshape(3, k)
        return np.concatenate((gen.flow(r), (gen.flow_jacobian(r) @ basis).ravel()))

    return rhs


def _benettin(
    gen: TorsionGenerator,
    r0: BlochVector | Any,
    transient: float,
    total_time: float,
    renorm_interval: float,
    cfg: IntegratorConfig | None,
    k: int,
) -> tuple[NDArray[np.float64], list[tuple[float, float]]]:
    if not 0 < renorm_interval < total_time:
        raise ValidationError(
            "renormalisation interval must be positive and shorter than the total time"
        )
    cfg = cfg or IntegratorConfig()
    stepper = init_stepper(cfg)
    r, h = as_array(r0), cfg.dt
    if transient > 0:
        r, h = advance(stepper, gen.flow, r, transient, h, cfg.max_steps)

    basis = np.eye(3)[:, :k]
    y = np.concatenate((r, basis.ravel()))
    rhs = _tangent_rhs(gen, k)
    n_intervals = max(1, round(total_time / renorm_interval))
    log_sums = np.zeros(k)
    running: list[tuple[float, float]] = []

    for i in range(1, n_intervals + 1):
        y, h = advance(stepper, rhs, y, renorm_interval, h, cfg.max_steps)
        q, upper = np.linalg.qr(y[3:].reshape(3, k))
        stretch = np.abs(np.diag(upper))
        if not np.all(np.isfinite(stretch)) or np.any(stretch == 0):
            raise NonFiniteStateError(f"tangent dynamics degenerated at interval {i}")
        log_sums += np.log(stretch)
        y = np.concatenate((y[:3], q.ravel()))
        t = i * renorm_interval
        running.append((t, float(log_sums[0] / t)))

    return log_sums / (n_intervals * renorm_interval), running


def _spread(running: list[tuple[float, float]]) -> float:
    tail = [v for _, v in running[-max(1, len(running) // 4) :]]
    return float(max(tail) - min(tail))


def largest_lyapunov(
    gen: TorsionGenerator,
    r0: BlochVector | Any,
    transient: float = 20.0,
    total_time: float = 2000.0,
    renorm_interval: float = 0.5,
    cfg: IntegratorConfig | None = None,
) -> LyapunovResult:
    """Largest exponent by co-integrating one tangent vector, started at ``(1, 0, 0)``.

    ``total_time`` is measured after the transient.
    """
    exponents, running = _benettin(
        gen, r0, transient, total_time, renorm_interval, cfg, k=1
    )
    result = LyapunovResult(
        lambda_max=float(exponents[0]),
        running_estimates=running,
        renorm_interval=renorm_interval,
        total_time=total_time,
        transient=transient,
        spread=_spread(running),
    )
    logger.debug(f"lambda_max = {result.lambda_max:.6f} (spread {result.spread:.2e})")
    return result


def lyapunov_spectrum(
    gen: TorsionGenerator,
    r0: BlochVector | Any,
    transient: float = 20.0,
    total_time: float = 2000.0,
    renorm_interval: float = 0.5,
    cfg: IntegratorConfig | None = None,
) -> LyapunovResult:
    """All three exponents by QR re-orthonormalisation of a tangent frame."""
    exponents, running = _benettin(
        gen, r0, transient, total_time, renorm_interval, cfg, k=3
    )
    ordered = sorted((float(v) for v in exponents), reverse=True)
    return LyapunovResult(
        lambda_max=ordered[0],
        running_estimates=running,
        renorm_interval=renorm_interval,
        total_time=total_time,
        transient=transient,
        spread=_spread(running),
        exponents=ordered,
    )


def default_lobe_threshold(traj: Trajectory) -> float:
    """A quarter of the Lor63 fixed-point ``|x|``; zero for other models."""
    spec = traj.generator
    if spec.model == "lor63" and spec.lor63.rho > 1:
        return 0.25 * spec.lor63.fixed_point_x
    return 0.0


def lobe_statistics(
    traj: Trajectory,
    axis: Axis | str = Axis.X,
    threshold: float | None = None,
) -> LobeStats:
    """Lobe switches: sign changes of one coordinate with hysteresis.

    A switch is counted once the coordinate has been beyond ``threshold`` on one side
    and then beyond it on the other; its time is the interpolated zero crossing in
    between.
    """
    if len(traj) < 2:
        raise ValidationError("lobe statistics need at least two samples")
    ax = Axis(str(axis).lower())
    thr = default_lobe_threshold(traj) if threshold is None else threshold
    values = traj.r[:, ax.index]
    times = traj.t

    side = 0
    crossing: float | None = None
    switches: list[float] = []
    for i in range(len(values)):
        v = float(values[i])
        if i > 0:
            prev = float(values[i - 1])
            if (prev < 0 <= v) or (prev > 0 >= v):
                crossing = float(
                    times[i - 1] + (times[i] - times[i - 1]) * prev / (prev - v)
                )
        if abs(v) > thr:
            s = 1 if v > 0 else -1
            if side and s != side and crossing is not None:
                switches.append(crossing)
            side = s

    return LobeStats(
        axis=ax,
        threshold=thr,
        switch_times=switches,
        residence_durations=[float(d) for d in np.diff(switches)],
        switch_count=len(switches),
    )


def gp_invariants(
    r: NDArray[np.float64], p: GPParams
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """First integrals of the GP butterfly flow, evaluated row-wise.

    ``C = y - (g/2m) z^2`` and ``H = (m/2) x^2 - (A/2) z^2 + (g^2/8m) z^4`` with
    ``A = m - g C``.
    """
    x, y, z = r[:, 0], r[:, 1], r[:, 2]
    casimir = y - (p.g / (2 * p.m)) * z**2
    a = p.m - p.g * casimir
    energy = (p.m / 2) * x**2 - (a / 2) * z**2 + (p.g**2 / (8 * p.m)) * z**4
    return casimir, energy


def conservation_monitor(
    traj: Trajectory, p: GPParams | None = None
) -> list[ConservationDrift]:
    if p is None:
        if traj.generator.model != "gp":
            raise ValidationError("conservation monitor needs GP parameters")
        p = traj.generator.gp
    drifts = []
    for name, series in zip(("C", "H"), gp_invariants(traj.r, p)):
        drifts.append(
            ConservationDrift(
                quantity=name,
                initial=float(series[0]),
                max_drift=float(np.max(np.abs(series - series[0]))),
            )
        )
    return drifts


@dataclass(frozen=True, eq=False)
class EntropySeries:
    t: NDArray[np.float64]
    entropy: NDArray[np.float64]
    purity: NDArray[np.float64]
    norm: NDArray[np.float64]
    unphysical: NDArray[np.bool_]

    def summary(self) -> EntropySummary:
        physical = ~self.unphysical
        s = self.entropy[physical]
        slopes = np.diff(s)
        return EntropySummary(
            min_entropy=float(np.min(s)) if len(s) else None,
            max_entropy=float(np.max(s)) if len(s) else None,
            decreasing_fraction=float(np.mean(slopes < 0)) if len(slopes) else 0.0,
            unphysical_samples=int(np.sum(self.unphysical)),
        )


def entropy_series(traj: Trajectory, tol: float = PHYSICAL_TOL) -> EntropySeries:
    """Entropy, purity and norm per sample; entropy is NaN where |r| > 1 + tol."""
    norm = traj.norm
    unphysical = norm > 1.0 + tol
    if np.any(unphysical):
        logger.warning(f"{int(np.sum(unphysical))} unphysical samples in trajectory")
    return EntropySeries(
        t=traj.t.copy(),
        entropy=traj.entropy,
        purity=traj.purity,
        norm=norm,
        unphysical=unphysical,
    )


def containment_summary(
    trajectories: Sequence[Trajectory],
    transient: float = 5.0,
    tol: float = PHYSICAL_TOL,
) -> ContainmentSummary:
    norms = [t.norm[t.after(transient)] for t in trajectories]
    tail = np.concatenate(norms) if norms else np.zeros(0)
    max_norm = float(np.max(tail)) if len(tail) else None
    unphysical = int(sum(np.sum(t.norm > 1.0 + tol) for t in trajectories))
    return ContainmentSummary(
        transient=transient,
        trajectories=len(trajectories),
        max_norm=max_norm,
        unphysical_samples=unphysical,
        contained=max_norm is not None and max_norm <= 1.0 + tol,
    )


def divergence(gen: TorsionGenerator, r: BlochVector | Any) -> float:
    """Trace of the Jacobian, the local phase-volume growth rate."""
    return float(np.trace(gen.flow_jacobian(as_array(r))))
