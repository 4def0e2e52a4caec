"""Subcommand implementations: integrate, analyse, and write artifacts with manifests."""

from __future__ import annotations

import time
from pathlib import Path
from typing import Callable, Sequence

from loguru import logger

from lorenz_qubit.config import InitialMode, RunConfig
from lorenz_qubit.diagnostics import (
    DiagnosticResult,
    conservation_monitor,
    containment_summary,
    entropy_series,
    fixed_point_scan,
    largest_lyapunov,
    lobe_statistics,
    lyapunov_spectrum,
)
from lorenz_qubit.errors import LorenzQubitError
from lorenz_qubit.generators import TorsionGenerator
from lorenz_qubit.integrate import (
    Trajectory,
    ensemble,
    integrate_bloch,
    integrate_density,
    random_ball_seeds,
)
from lorenz_qubit.io import (
    RunManifest,
    export_ensemble,
    export_trajectory,
    manifest_path,
    termination_summary,
    write_manifest,
    write_report,
)
from lorenz_qubit.plot import render_projection
from lorenz_qubit.settings import Settings
from lorenz_qubit.state import BlochVector, density_from_bloch


class Session:
    """State shared by one subcommand invocation."""

    def __init__(self, config: RunConfig, settings: Settings):
        self.config = config
        self.settings = settings
        self.generator: TorsionGenerator = config.generator.build()
        self.started = time.perf_counter()

    @property
    def out_dir(self) -> Path:
        return Path(self.config.output.out_dir or self.settings.OUTPUT_DIR)

    def manifest(
        self, trajectories: Sequence[Trajectory] = (), files: Sequence[Path] = ()
    ) -> RunManifest:
        containment = (
            containment_summary(
                trajectories,
                transient=self.config.analysis.transient,
                tol=self.settings.PHYSICAL_TOL,
            )
            if trajectories
            else None
        )
        return RunManifest(
            config=self.config,
            termination=termination_summary(trajectories),
            containment=containment,
            files=[str(f) for f in files],
        )

    @property
    def wall_time_s(self) -> float:
        return time.perf_counter() - self.started

    def write_manifest(self, manifest: RunManifest, path: Path) -> Path:
        wall = self.wall_time_s
        logger.info(f"Wall time {wall:.2f}s")
        return write_manifest(manifest, path, wall_time_s=wall)

    def seeds(self) -> list[BlochVector]:
        initial = self.config.initial
        if initial.mode == InitialMode.ENSEMBLE and initial.ensemble is not None:
            spec = initial.ensemble
            return random_ball_seeds(spec.count, spec.radius, spec.rng_seed)
        return [initial.bloch]

    def report(
        self, results: Sequence[DiagnosticResult], manifest: RunManifest
    ) -> None:
        if self.config.output.report:
            path = write_report(results, self.config.output.report, manifest)
            logger.info(f"Report written to {path}")


def trajectory_diagnostics(
    traj: Trajectory, config: RunConfig, tol: float
) -> list[DiagnosticResult]:
    """Containment, entropy summary and the model's own checks for one trajectory."""
    transient = config.analysis.transient
    results: list[DiagnosticResult] = [
        containment_summary([traj], transient=transient, tol=tol),
        entropy_series(traj, tol=tol).summary(),
    ]
    if traj.generator.model == "lor63":
        results.append(
            lobe_statistics(
                traj,
                axis=config.analysis.lobe_axis,
                threshold=config.analysis.lobe_threshold,
            )
        )
    elif traj.generator.model == "gp":
        results.extend(conservation_monitor(traj))
    return results


def run_simulate(config: RunConfig, settings: Settings) -> None:
    session = Session(config, settings)
    r0 = config.initial.bloch
    if config.initial.density:
        traj = integrate_density(
            session.generator, density_from_bloch(r0), config.integrator
        )
    else:
        traj = integrate_bloch(session.generator, r0, config.integrator)
    logger.info(
        f"Integrated {traj.form} form to t={traj.t[-1]:g}: {len(traj)} samples, "
        f"{traj.termination}"
    )

    target = config.output.out or session.out_dir / "trajectory.csv"
    path = export_trajectory(traj, target)
    manifest = session.manifest([traj], [path])
    session.write_manifest(manifest, manifest_path(path))
    logger.info(f"Trajectory written to {path}")
    if manifest.containment and not manifest.containment.contained:
        logger.warning(f"Trajectory leaves the Bloch ball: {manifest.containment}")
    results = trajectory_diagnostics(traj, config, settings.PHYSICAL_TOL)
    session.report(results, manifest)


def run_ensemble(config: RunConfig, settings: Settings) -> None:
    session = Session(config, settings)
    trajectories = _integrate_ensemble(session)
    files = export_ensemble(trajectories, session.out_dir)
    manifest = session.manifest(trajectories, files)
    session.write_manifest(manifest, session.out_dir / "manifest.json")
    logger.info(f"{len(files)} trajectories written to {session.out_dir}")
    session.report([c for c in [manifest.containment] if c is not None], manifest)


def run_lyapunov(config: RunConfig, settings: Settings) -> None:
    session = Session(config, settings)
    analysis = config.analysis
    estimate = lyapunov_spectrum if analysis.spectrum else largest_lyapunov
    result = estimate(
        session.generator,
        config.initial.bloch,
        transient=analysis.lyapunov_transient,
        total_time=analysis.lyapunov_total_time,
        renorm_interval=analysis.renorm_interval,
        cfg=config.integrator,
    )
    logger.info(f"lambda_max = {result.lambda_max:.6f} (spread {result.spread:.2e})")
    if result.exponents is not None:
        logger.info(f"Spectrum: {', '.join(f'{v:.6f}' for v in result.exponents)}")
    session.report([result], session.manifest())


def run_fixed_points(config: RunConfig, settings: Settings) -> None:
    session = Session(config, settings)
    analysis = config.analysis
    points = fixed_point_scan(
        session.generator,
        analysis.guesses,
        tol=analysis.newton_tol,
        max_iter=analysis.newton_max_iter,
    )
    if not points:
        raise LorenzQubitError("no fixed point converged from any guess")
    for fp in points:
        logger.info(
            f"Fixed point {tuple(fp.r_star)}: {fp.classification}, "
            f"residual {fp.residual:.1e}"
        )
    session.report(points, session.manifest())


def run_plot(config: RunConfig, settings: Settings) -> None:
    session = Session(config, settings)
    trajectories = _integrate_ensemble(session)
    files = [
        render_projection(
            trajectories,
            plane,
            session.out_dir / f"{config.plot.stem}_{plane}.svg",
            transient=config.plot.transient,
            max_points=config.plot.max_points,
        )
        for plane in config.plot.planes
    ]
    manifest = session.manifest(trajectories, files)
    session.write_manifest(
        manifest, session.out_dir / f"{config.plot.stem}.manifest.json"
    )
    if manifest.containment is not None:
        logger.info(
            f"max |r| after t={manifest.containment.transient:g}: "
            f"{manifest.containment.max_norm}"
        )
    session.report([c for c in [manifest.containment] if c is not None], manifest)


def _integrate_ensemble(session: Session) -> list[Trajectory]:
    seeds = session.seeds()
    workers = session.config.workers
    logger.info(f"Integrating {len(seeds)} trajectories on {workers} worker(s)")
    trajectories = ensemble(
        session.generator, seeds, session.config.integrator, workers=workers
    )
    logger.info(f"Terminations: {dict(termination_summary(trajectories))}")
    return trajectories


COMMANDS: dict[str, Callable[[RunConfig, Settings], None]] = {
    "simulate": run_simulate,
    "ensemble": run_ensemble,
    "lyapunov": run_lyapunov,
    "fixed-points": run_fixed_points,
    "plot": run_plot,
}


def run(config: RunConfig, settings: Settings) -> None:
    COMMANDS[config.command](config, settings)
