"""Run configuration: the JSON config-file schema and what the CLI resolves to."""

from __future__ import annotations

from enum import StrEnum
from typing import Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    model_validator,
)

from lorenz_qubit.base import IntegratorConfig
from lorenz_qubit.generators import Axis, GeneratorSpec
from lorenz_qubit.state import BlochVector

Command = Literal["simulate", "ensemble", "lyapunov", "fixed-points", "plot"]
Plane = Literal["xy", "xz", "yz"]


class InitialMode(StrEnum):
    EXPLICIT = "explicit"
    ENSEMBLE = "ensemble"


class _Options(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class EnsembleSpec(_Options):
    """Seeds uniform in a ball of ``radius`` about the origin."""

    count: PositiveInt = 500
    radius: float = Field(default=0.9, gt=0.0, le=1.0)
    rng_seed: int = 0


class InitialCondition(_Options):
    mode: InitialMode = InitialMode.EXPLICIT
    r0: tuple[float, float, float] = (0.12, 0.12, 0.3)
    ensemble: EnsembleSpec | None = None
    density: bool = False

    @model_validator(mode="after")
    def _ensemble_needs_spec(self) -> InitialCondition:
        if self.mode == InitialMode.ENSEMBLE and self.ensemble is None:
            raise ValueError("ensemble mode requires an 'ensemble' section")
        return self

    @property
    def bloch(self) -> BlochVector:
        return BlochVector(*self.r0)


class OutputOptions(_Options):
    out: str | None = None
    out_dir: str | None = None
    report: str | None = None


class PlotOptions(_Options):
    """``stem`` names the SVG files: ``<stem>_<plane>.svg``."""

    stem: str = "projection"
    planes: list[Plane] = Field(default_factory=lambda: ["xz"])
    transient: NonNegativeFloat = 5.0
    max_points: PositiveInt = 400


class AnalysisOptions(_Options):
    lyapunov_transient: NonNegativeFloat = 20.0
    lyapunov_total_time: PositiveFloat = 2000.0
    renorm_interval: PositiveFloat = 0.5
    spectrum: bool = False
    newton_tol: PositiveFloat = 1e-12
    newton_max_iter: PositiveInt = 50
    guesses: list[tuple[float, float, float]] | None = None
    lobe_axis: Axis = Axis.X
    lobe_threshold: NonNegativeFloat | None = None
    transient: NonNegativeFloat = 5.0


class RunConfig(_Options):
    command: Command = "simulate"
    generator: GeneratorSpec = Field(default_factory=GeneratorSpec)
    initial: InitialCondition = Field(default_factory=InitialCondition)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    output: OutputOptions = Field(default_factory=OutputOptions)
    plot: PlotOptions = Field(default_factory=PlotOptions)
    analysis: AnalysisOptions = Field(default_factory=AnalysisOptions)
    workers: PositiveInt = 1
