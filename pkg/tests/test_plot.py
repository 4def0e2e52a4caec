"""Tests for plot module."""

import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lorenz_qubit.base import IntegratorConfig
from lorenz_qubit.errors import OutputError, ValidationError
from lorenz_qubit.generators import GeneratorSpec, lor63_generator
from lorenz_qubit.integrate import Trajectory, ensemble, random_ball_seeds
from lorenz_qubit.plot import MIN_LIMIT, axis_limit, equator_markers, render_projection


def origin_trajectory() -> Trajectory:
    return Trajectory(
        t=np.array([0.0, 1.0]),
        r=np.zeros((2, 3)),
        generator=GeneratorSpec(),
        config=IntegratorConfig(),
    )


def line_trajectory(x: float) -> Trajectory:
    return Trajectory(
        t=np.array([0.0, 1.0]),
        r=np.array([[0.0, 0.0, 0.0], [x, 0.0, 0.0]]),
        generator=GeneratorSpec(),
        config=IntegratorConfig(),
    )


class TestAxisLimit:
    def test_unit_ball_keeps_default_view(self) -> None:
        assert axis_limit(np.array([[0.5, -1.0], [1.0, 0.2]])) == MIN_LIMIT

    def test_widens_for_points_outside_the_circle(self) -> None:
        """A sample at 1.107 would be clipped by a fixed 1.1 view."""
        limit = axis_limit(np.array([[1.107, 0.0], [0.0, -0.3]]))
        assert limit > 1.107
        assert limit == pytest.approx(1.05 * 1.107)

    def test_ignores_non_finite(self) -> None:
        assert axis_limit(np.array([[np.nan, 1.3]])) == pytest.approx(1.05 * 1.3)
        assert axis_limit(np.full((1, 2), np.nan)) == MIN_LIMIT


class TestEquatorMarkers:
    def test_xy_plane_shows_all_four(self) -> None:
        markers = dict(equator_markers("xy"))
        assert markers == {
            "|+>": (1.0, 0.0),
            "|->": (-1.0, 0.0),
            "|+i>": (0.0, 1.0),
            "|-i>": (0.0, -1.0),
        }

    def test_xz_plane_drops_states_on_the_y_axis(self) -> None:
        assert [label for label, _ in equator_markers("xz")] == ["|+>", "|->"]

    def test_yz_plane(self) -> None:
        assert dict(equator_markers("yz")) == {"|+i>": (1.0, 0.0), "|-i>": (-1.0, 0.0)}


class TestRenderProjection:
    def test_origin_is_well_formed_svg(self, tmp_path: Path) -> None:
        path = render_projection([origin_trajectory()], "xz", tmp_path / "o.svg", 0.0)
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")

    def test_deterministic(self, tmp_path: Path) -> None:
        trajectories = [origin_trajectory()]
        a = render_projection(trajectories, "xy", tmp_path / "a.svg", 0.0)
        b = render_projection(trajectories, "xy", tmp_path / "b.svg", 0.0)
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("plane", ["xy", "xz", "yz"])
    def test_every_plane(self, tmp_path: Path, plane: str) -> None:
        path = render_projection([origin_trajectory()], plane, tmp_path / "p.svg", 0.0)
        assert path.stat().st_size > 0

    def test_empty_after_transient(self, tmp_path: Path) -> None:
        with pytest.raises(ValidationError, match="smaller transient"):
            render_projection([origin_trajectory()], "xz", tmp_path / "e.svg", 5.0)

    def test_unknown_plane(self, tmp_path: Path) -> None:
        with pytest.raises(ValidationError, match="plane"):
            render_projection([origin_trajectory()], "xw", tmp_path / "e.svg", 0.0)

    def test_needs_a_trajectory(self, tmp_path: Path) -> None:
        with pytest.raises(ValidationError):
            render_projection([], "xz", tmp_path / "e.svg", 0.0)

    def test_points_outside_the_ball_still_render(self, tmp_path: Path) -> None:
        path = render_projection([line_trajectory(1.3)], "xy", tmp_path / "w.svg", 0.0)
        labels = "".join(ET.parse(path).getroot().itertext())
        assert "|+i>" in labels

    def test_unwritable_path(self, tmp_path: Path) -> None:
        with pytest.raises(OutputError):
            render_projection([origin_trajectory()], "xz", tmp_path, 0.0)

    def test_lor63_cloud_inside_unit_circle(self, tmp_path: Path) -> None:
        seeds = random_ball_seeds(5, 0.9, rng_seed=0)
        cfg = IntegratorConfig(method="rk4", dt=0.01, t_max=20.0)
        trajectories = ensemble(lor63_generator(), seeds, cfg)
        path = render_projection(
            trajectories, "xz", tmp_path / "lor63.svg", transient=5.0, max_points=100
        )
        ET.parse(path)
        tail = np.concatenate([t.r[t.after(5.0)] for t in trajectories])
        assert np.max(np.hypot(tail[:, 0], tail[:, 2])) < 1.0
