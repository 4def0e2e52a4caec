"""2D projections of ensemble point clouds onto a coordinate plane of the Bloch ball."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Sequence

import matplotlib
import numpy as np
from loguru import logger
from matplotlib.figure import Figure
from matplotlib.patches import Circle
from numpy.typing import NDArray

from lorenz_qubit.errors import OutputError, ValidationError
from lorenz_qubit.integrate import Trajectory

PLANES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}
LOBE_COLORS = ("#ff69b4", "#00bcd4")
SEED_COLOR = "#1f3fbf"
MARKER_COLOR = "#444444"
EQUATOR_STATES = {
    "|+>": (1.0, 0.0, 0.0),
    "|->": (-1.0, 0.0, 0.0),
    "|+i>": (0.0, 1.0, 0.0),
    "|-i>": (0.0, -1.0, 0.0),
}
MIN_LIMIT = 1.1
# Fixed element ids and text as text keep the SVG byte-stable.
SVG_RC = {"svg.hashsalt": "lorenz-qubit", "svg.fonttype": "none"}


def axis_limit(points: NDArray[Any]) -> float:
    """Half-width of the square view: at least ``MIN_LIMIT``, with 5% headroom over the data."""
    finite = np.abs(points[np.isfinite(points)])
    if finite.size == 0:
        return MIN_LIMIT
    return max(MIN_LIMIT, 1.05 * float(np.max(finite)))


def equator_markers(plane: str) -> list[tuple[str, tuple[float, float]]]:
    """Equator states whose projection onto ``plane`` is not the origin."""
    i, j = PLANES[plane]
    return [
        (label, (r[i], r[j]))
        for label, r in EQUATOR_STATES.items()
        if r[i] != 0.0 or r[j] != 0.0
    ]


def render_projection(
    trajectories: Sequence[Trajectory],
    plane: str,
    path: str | Path,
    transient: float = 5.0,
    max_points: int | None = 400,
) -> Path:
    """Scatter the post-transient samples of every trajectory into an SVG.

    Points are coloured by the sign of ``x`` (the two lobes); initial conditions are
    drawn as blue dots. The unit circle is the Bloch sphere silhouette, with crosses on
    the equator states. The view widens past the circle when samples leave it.
    Identical input produces a byte-identical file.
    """
    if not trajectories:
        raise ValidationError("at least one trajectory is needed for a projection")
    if plane not in PLANES:
        raise ValidationError(f"plane must be one of {list(PLANES)}, got '{plane}'")
    i, j = PLANES[plane]

    clouds = []
    for traj in trajectories:
        tail = traj.r[traj.after(transient)]
        if max_points and len(tail) > max_points:
            tail = tail[:: math.ceil(len(tail) / max_points)]
        clouds.append(tail)
    points = np.concatenate(clouds)
    if len(points) == 0:
        raise ValidationError(
            f"no samples after transient t={transient}; use a smaller transient"
        )
    seeds = np.array([traj.r[0] for traj in trajectories])

    fig = Figure(figsize=(6, 6))
    ax = fig.subplots()
    ax.add_patch(Circle((0.0, 0.0), 1.0, fill=False, color="#c8b400", lw=1.0))
    lobe = points[:, 0] >= 0
    for mask, color in ((lobe, LOBE_COLORS[0]), (~lobe, LOBE_COLORS[1])):
        if np.any(mask):
            ax.scatter(points[mask, i], points[mask, j], s=1.0, c=color, linewidths=0)
    ax.scatter(seeds[:, i], seeds[:, j], s=12.0, c=SEED_COLOR, linewidths=0)
    for label, (u, v) in equator_markers(plane):
        ax.plot([u], [v], marker="x", ms=5.0, color=MARKER_COLOR, lw=0)
        ax.annotate(label, (u, v), xytext=(4, 4), textcoords="offset points", fontsize=8)
    lim = axis_limit(np.concatenate([points[:, [i, j]], seeds[:, [i, j]]]))
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_xlabel(plane[0])
    ax.set_ylabel(plane[1])

    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with matplotlib.rc_context(SVG_RC):
            fig.savefig(target, format="svg", metadata={"Date": None})
    except OSError as e:
        raise OutputError(f"cannot write projection to {target}: {e}") from e
    logger.info(f"wrote {plane} projection of {len(points)} points to {target}")
    return target
