"""Command line parsing into a validated ``RunConfig``.

Values are layered, lowest priority first: model defaults, environment settings,
a ``plot --recipe`` preset, the JSON ``--config`` file, then explicit flags.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Any, NoReturn, Sequence

from pydantic import ValidationError as PydanticValidationError

from lorenz_qubit import __version__
from lorenz_qubit.config import RunConfig
from lorenz_qubit.errors import OutputError, UsageError, ValidationError
from lorenz_qubit.settings import Settings

PLANE_CHOICES = ("xy", "xz", "yz", "all")


def _figure_recipe(model: str, stem: str) -> dict[str, Any]:
    """500 seeds in the 0.9 ball, t in [0, 200], first 5 time units dropped."""
    return {
        "generator": {"model": model},
        "initial": {
            "mode": "ensemble",
            "ensemble": {"count": 500, "radius": 0.9, "rng_seed": 0},
        },
        "integrator": {"t_max": 200.0},
        "plot": {"stem": stem, "transient": 5.0},
        "analysis": {"transient": 5.0},
    }


RECIPES: dict[str, dict[str, Any]] = {
    "fig1": _figure_recipe("lor63", "fig1"),
    "fig2": _figure_recipe("gp", "fig2"),
}


class ArgumentParser(argparse.ArgumentParser):
    """Raises ``UsageError`` instead of exiting, so ``main`` owns the exit code.

    Abbreviated flags are rejected along with unknown ones.
    """

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    generator = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    group = generator.add_argument_group("generator")
    group.add_argument("--config", type=Path, help="JSON file mirroring RunConfig")
    group.add_argument("--model", choices=("lor63", "gp", "custom"))
    group.add_argument("--rho", type=float)
    group.add_argument("--sigma", type=float)
    group.add_argument("--beta", type=float)
    group.add_argument("--g", type=float, help="torsion strength of the chosen model")
    group.add_argument("--m", type=float, help="GP linear strength")
    group.add_argument(
        "--linear", type=float, nargs=9, metavar="L", help="custom L, row-major"
    )
    group.add_argument("--projection-axis", type=float, nargs=3, metavar="E")
    group.add_argument("--twist-axis", choices=("x", "y", "z"))
    group.add_argument("--report", help="write a JSON diagnostics report here")

    initial = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    group = initial.add_argument_group("initial state")
    group.add_argument("--x0", type=float)
    group.add_argument("--y0", type=float)
    group.add_argument("--z0", type=float)

    integrator = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    group = integrator.add_argument_group("integrator")
    group.add_argument("--method", choices=("rk4", "rk45"))
    group.add_argument("--dt", type=float)
    group.add_argument("--rel-tol", type=float)
    group.add_argument("--abs-tol", type=float)
    group.add_argument("--t-max", type=float)
    group.add_argument("--sample-every", type=int)
    group.add_argument("--max-steps", type=int)
    group.add_argument("--transient", type=float)

    seeds = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    group = seeds.add_argument_group("ensemble")
    group.add_argument("--n", type=int, help="number of seeds")
    group.add_argument("--radius", type=float, help="seed ball radius, in (0, 1]")
    group.add_argument("--seed", type=int, help="RNG seed")
    group.add_argument("--workers", type=int)
    group.add_argument("--out-dir")

    parser = ArgumentParser(
        prog="lorenz-qubit",
        description="Nonlinear qubit channels with Lorenz-type Bloch-ball dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser(
        "simulate",
        parents=[generator, initial, integrator],
        help="integrate one trajectory to CSV",
    )
    simulate.add_argument("--density", action="store_true", default=None)
    simulate.add_argument("--out")

    commands.add_parser(
        "ensemble",
        parents=[generator, integrator, seeds],
        help="integrate seeds uniform in a ball, one CSV each",
    )

    lyapunov = commands.add_parser(
        "lyapunov",
        parents=[generator, initial, integrator],
        help="Benettin estimate of the largest Lyapunov exponent",
    )
    lyapunov.add_argument("--total-time", type=float)
    lyapunov.add_argument("--renorm-interval", type=float)
    lyapunov.add_argument("--spectrum", action="store_true", default=None)

    fixed_points = commands.add_parser(
        "fixed-points", parents=[generator], help="Newton search for fixed points"
    )
    fixed_points.add_argument(
        "--guess", type=float, nargs=3, action="append", metavar="R"
    )
    fixed_points.add_argument("--newton-tol", type=float)
    fixed_points.add_argument("--max-iter", type=int)

    plot = commands.add_parser(
        "plot",
        parents=[generator, integrator, seeds],
        help="SVG projections of an ensemble point cloud",
    )
    plot.add_argument("--recipe", choices=sorted(RECIPES))
    plot.add_argument("--plane", choices=PLANE_CHOICES)
    plot.add_argument("--max-points", type=int)

    return parser


def parse_cli(
    argv: Sequence[str] | None = None, settings: Settings | None = None
) -> RunConfig:
    """Resolve ``argv`` into a validated ``RunConfig``; misuse raises ``UsageError``."""
    args = build_parser().parse_args(argv)
    settings = settings or Settings()

    layers: list[dict[str, Any]] = [{"workers": settings.WORKERS}]
    recipe = getattr(args, "recipe", None)
    if recipe:
        layers.append(RECIPES[recipe])
    if args.config is not None:
        layers.append(_load_config_file(args.config))

    merged: dict[str, Any] = {}
    for layer in layers:
        merged = deep_merge(merged, layer)
    merged = deep_merge(merged, _flag_overrides(args, merged))
    merged["command"] = args.command

    try:
        config = RunConfig.model_validate(merged)
        config.generator.build()
    except PydanticValidationError as e:
        raise UsageError(f"invalid configuration: {e}") from e
    except ValidationError as e:
        raise UsageError(f"invalid generator: {e}") from e
    return config


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; values in ``override`` win, nested dicts are merged."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _load_config_file(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text()
    except OSError as e:
        raise OutputError(f"cannot read config file {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return data


def _flag_overrides(args: argparse.Namespace, lower: dict[str, Any]) -> dict[str, Any]:
    """Only flags given on the command line; everything else stays with lower layers."""

    def given(name: str) -> Any:
        return getattr(args, name, None)

    out: dict[str, Any] = {}

    def put(path: str, value: Any) -> None:
        if value is None:
            return
        node = out
        *parents, leaf = path.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value

    model = given("model") or lower.get("generator", {}).get("model", "lor63")
    put("generator.model", given("model"))
    put("generator.lor63.rho", given("rho"))
    put("generator.lor63.sigma", given("sigma"))
    put("generator.lor63.beta", given("beta"))
    put("generator.gp.m", given("m"))
    # --g belongs to whichever model ends up selected.
    put("generator.g" if model == "custom" else f"generator.{model}.g", given("g"))
    if given("linear") is not None:
        values = given("linear")
        put("generator.linear", [values[0:3], values[3:6], values[6:9]])
    put("generator.projection_axis", given("projection_axis"))
    put("generator.twist_axis", given("twist_axis"))

    components = [given("x0"), given("y0"), given("z0")]
    if any(c is not None for c in components):
        current = list(lower.get("initial", {}).get("r0", (0.12, 0.12, 0.3)))
        r0 = [c if c is not None else current[i] for i, c in enumerate(components)]
        put("initial.r0", r0)
    put("initial.density", given("density"))

    if args.command in ("ensemble", "plot"):
        put("initial.mode", "ensemble")
        out.setdefault("initial", {}).setdefault("ensemble", {})
        put("initial.ensemble.count", given("n"))
        put("initial.ensemble.radius", given("radius"))
        put("initial.ensemble.rng_seed", given("seed"))

    put("integrator.method", given("method"))
    put("integrator.dt", given("dt"))
    put("integrator.rel_tol", given("rel_tol"))
    put("integrator.abs_tol", given("abs_tol"))
    put("integrator.t_max", given("t_max"))
    put("integrator.sample_every", given("sample_every"))
    put("integrator.max_steps", given("max_steps"))

    put("output.out", given("out"))
    put("output.out_dir", given("out_dir"))
    put("output.report", given("report"))
    put("workers", given("workers"))

    transient = given("transient")
    if args.command == "lyapunov":
        put("analysis.lyapunov_transient", transient)
    else:
        put("analysis.transient", transient)
    if args.command == "plot":
        put("plot.transient", transient)
    put("analysis.lyapunov_total_time", given("total_time"))
    put("analysis.renorm_interval", given("renorm_interval"))
    put("analysis.spectrum", given("spectrum"))
    put("analysis.guesses", given("guess"))
    put("analysis.newton_tol", given("newton_tol"))
    put("analysis.newton_max_iter", given("max_iter"))

    plane = given("plane")
    if plane is not None:
        put("plot.planes", ["xy", "xz", "yz"] if plane == "all" else [plane])
    put("plot.max_points", given("max_points"))
    return out
