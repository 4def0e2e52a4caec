"""Trajectory CSV export, run manifests and JSON diagnostic reports."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Sequence

import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from lorenz_qubit import __version__
from lorenz_qubit.config import RunConfig
from lorenz_qubit.diagnostics import (
    ConservationDrift,
    ContainmentSummary,
    EntropySummary,
    FixedPoint,
    LobeStats,
    LyapunovResult,
)
from lorenz_qubit.errors import OutputError, ValidationError
from lorenz_qubit.integrate import TerminationReason, Trajectory

CSV_HEADER = ("t", "x", "y", "z", "norm", "purity", "entropy", "trace_err")
SCHEMA_VERSION = 1

ReportResult = Annotated[
    FixedPoint
    | LyapunovResult
    | LobeStats
    | ConservationDrift
    | ContainmentSummary
    | EntropySummary,
    Field(discriminator="kind"),
]


class RunManifest(BaseModel):
    """Everything needed to reproduce an export.

    Holds no timing, so identical configs give identical bytes; wall time goes to the
    ``RunTiming`` sidecar.
    """

    model_config = ConfigDict(frozen=True)

    config: RunConfig
    version: str = __version__
    termination: dict[TerminationReason, int] = Field(default_factory=dict)
    containment: ContainmentSummary | None = None
    files: list[str] = Field(default_factory=list)


class RunTiming(BaseModel):
    model_config = ConfigDict(frozen=True)

    manifest: str
    wall_time_s: float


class Report(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    manifest: RunManifest | None = None
    results: list[ReportResult] = Field(default_factory=list)


def format_float(value: float) -> str:
    """Shortest repr that parses back to the same double; integral values lose ``.0``."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": traj.t,
            "x": traj.r[:, 0],
            "y": traj.r[:, 1],
            "z": traj.r[:, 2],
            "norm": traj.norm,
            "purity": traj.purity,
            "entropy": traj.entropy,
            "trace_err": traj.trace_error,
        },
        columns=list(CSV_HEADER),
    )


def export_trajectory(traj: Trajectory, path: str | Path) -> Path:
    """One row per sample in time order, floats at full round-trip precision."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        trajectory_frame(traj).to_csv(
            target,
            index=False,
            float_format=format_float,
            na_rep="nan",
            lineterminator="\n",
        )
    except OSError as e:
        raise OutputError(f"cannot write trajectory to {target}: {e}") from e
    logger.debug(f"wrote {len(traj)} samples to {target}")
    return target


def read_trajectory(path: str | Path) -> pd.DataFrame:
    source = Path(path)
    try:
        frame = pd.read_csv(source, dtype=float, float_precision="round_trip")
    except OSError as e:
        raise OutputError(f"cannot read trajectory from {source}: {e}") from e
    if tuple(frame.columns) != CSV_HEADER:
        raise ValidationError(
            f"{source} has columns {list(frame.columns)}, expected {list(CSV_HEADER)}"
        )
    return frame


def export_ensemble(
    trajectories: Sequence[Trajectory], out_dir: str | Path, stem: str = "traj"
) -> list[Path]:
    """One CSV per seed, named by zero-padded seed index."""
    width = max(4, len(str(len(trajectories) - 1)))
    return [
        export_trajectory(traj, Path(out_dir) / f"{stem}_{i:0{width}d}.csv")
        for i, traj in enumerate(trajectories)
    ]


def termination_summary(
    trajectories: Sequence[Trajectory],
) -> dict[TerminationReason, int]:
    summary = {reason: 0 for reason in TerminationReason}
    for traj in trajectories:
        summary[traj.termination] += 1
    return summary


def write_manifest(
    manifest: RunManifest, path: str | Path, wall_time_s: float | None = None
) -> Path:
    """Write the manifest, plus the timing sidecar when ``wall_time_s`` is given."""
    target = _write_json(manifest.model_dump_json(indent=2), Path(path))
    if wall_time_s is not None:
        timing = RunTiming(manifest=target.name, wall_time_s=wall_time_s)
        _write_json(timing.model_dump_json(indent=2), timing_path(target))
    return target


def timing_path(manifest: str | Path) -> Path:
    """``traj.manifest.json`` -> ``traj.timing.json``."""
    p = Path(manifest)
    if "manifest" in p.name:
        return p.with_name(p.name.replace("manifest", "timing", 1))
    return p.with_name(f"{p.stem}.timing.json")


def manifest_path(data_path: str | Path) -> Path:
    """Manifest written next to a data file: ``traj.csv`` -> ``traj.manifest.json``."""
    p = Path(data_path)
    return p.with_name(f"{p.stem}.manifest.json") if p.suffix else p / "manifest.json"


def write_report(
    results: Sequence[ReportResult],
    path: str | Path,
    manifest: RunManifest | None = None,
) -> Path:
    """JSON document ``{"schema", "manifest", "results"}``; no manifest key without one."""
    report = Report(manifest=manifest, results=list(results))
    exclude = {"manifest"} if manifest is None else None
    return _write_json(report.model_dump_json(by_alias=True, exclude=exclude), Path(path))


def read_report(path: str | Path) -> Report:
    source = Path(path)
    try:
        text = source.read_text()
    except OSError as e:
        raise OutputError(f"cannot read report {source}: {e}") from e
    try:
        return Report.model_validate_json(text)
    except PydanticValidationError as e:
        raise ValidationError(f"{source} is not a valid report: {e}") from e


def _write_json(text: str, target: Path) -> Path:
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text + "\n")
    except OSError as e:
        raise OutputError(f"cannot write {target}: {e}") from e
    logger.debug(f"wrote {target}")
    return target

