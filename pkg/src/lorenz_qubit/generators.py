"""Nonlinear generators ``G(r) = L + g (e.r) J_a`` acting on Bloch vectors.

The flow is ``dr/dt = G(r) r``. ``L`` is a fixed 3x3 real matrix, ``J_a`` an SO(3)
rotation generator and ``e.r`` the projection of the state on the twist axis, so the
nonlinearity is a rotation whose rate depends on the state (torsion).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Literal

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lorenz_qubit.errors import ValidationError
from lorenz_qubit.state import BlochVector, as_array

Mat3 = NDArray[np.float64]

UNIT_TOL = 1e-12


class Axis(StrEnum):
    X = "x"
    Y = "y"
    Z = "z"

    @property
    def index(self) -> int:
        return "xyz".index(self.value)

    @property
    def unit(self) -> NDArray[np.float64]:
        e = np.zeros(3)
        e[self.index] = 1.0
        return e


def _levi_civita() -> NDArray[np.float64]:
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0
    return eps


LEVI_CIVITA = _levi_civita()


def so3_generator(axis: Axis | str) -> Mat3:
    """Rotation generator ``(J_a)_bc = -eps_abc``; ``J_a r`` equals ``e_a x r``."""
    a = _axis(axis)
    return -LEVI_CIVITA[a.index].copy()


_GELL_MANN_PAIRS = {1: (0, 1), 4: (0, 2), 6: (1, 2)}


def gell_mann(index: int) -> Mat3:
    """Real symmetric off-diagonal Gell-Mann matrix (index 1, 4 or 6)."""
    if index not in _GELL_MANN_PAIRS:
        raise ValidationError(
            f"Gell-Mann index must be one of {sorted(_GELL_MANN_PAIRS)}, got {index}"
        )
    i, j = _GELL_MANN_PAIRS[index]
    m = np.zeros((3, 3))
    m[i, j] = m[j, i] = 1.0
    return m


class Lor63Params(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rho: float = 28.0
    sigma: float = 10.0
    beta: float = 8.0 / 3.0
    g: float = 80.0

    @model_validator(mode="after")
    def _warn_outside_canonical_regime(self) -> Lor63Params:
        if not np.all(np.isfinite([self.rho, self.sigma, self.beta, self.g])):
            raise ValueError("Lor63 parameters must be finite")
        if self.sigma <= 0 or self.beta <= 0 or self.g <= 0:
            logger.warning(
                f"Lor63 parameters outside the canonical regime "
                f"(sigma={self.sigma}, beta={self.beta}, g={self.g})"
            )
        return self

    @property
    def fixed_point_x(self) -> float:
        """|x| of the symmetric pair of nontrivial fixed points (NaN for rho < 1)."""
        if self.rho < 1:
            return float("nan")
        return float(np.sqrt(self.beta * (self.rho - 1)) / self.g)


class GPParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    m: float = 10.0
    g: float = 40.0

    @model_validator(mode="after")
    def _check_finite(self) -> GPParams:
        if not np.all(np.isfinite([self.m, self.g])):
            raise ValueError("GP parameters must be finite")
        return self


@dataclass(frozen=True, eq=False)
class TorsionGenerator:
    """``G(r) = linear + g (projection_axis . r) J_{twist_axis}``."""

    linear: Mat3
    g: float
    twist_axis: Axis
    projection_axis: NDArray[np.float64]
    name: str = "custom"
    params: Lor63Params | GPParams | None = None
    twist: Mat3 = field(init=False, repr=False)

    def __post_init__(self) -> None:
        linear = np.array(self.linear, dtype=float)
        e = np.array(self.projection_axis, dtype=float).reshape(3)
        if linear.shape != (3, 3) or not np.all(np.isfinite(linear)):
            raise ValidationError("linear part must be a finite 3x3 matrix")
        if abs(np.linalg.norm(e) - 1.0) > UNIT_TOL:
            raise ValidationError(
                f"projection axis must have unit norm, got |e| = {np.linalg.norm(e)!r}"
            )
        if not np.isfinite(self.g):
            raise ValidationError("torsion strength g must be finite")
        linear.flags.writeable = False
        e.flags.writeable = False
        twist = so3_generator(self.twist_axis)
        twist.flags.writeable = False
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "projection_axis", e)
        object.__setattr__(self, "twist_axis", Axis(self.twist_axis))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "twist", twist)

    def evaluate(self, r: BlochVector | ArrayLike) -> Mat3:
        v = as_array(r)
        return self.linear + self.g * float(self.projection_axis @ v) * self.twist

    def flow(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        """``G(r) r`` on a raw array; the integrators' hot path."""
        return self.linear @ r + (self.g * float(self.projection_axis @ r)) * (
            self.twist @ r
        )

    def flow_jacobian(self, r: NDArray[np.float64]) -> Mat3:
        return (
            self.linear
            + (self.g * float(self.projection_axis @ r)) * self.twist
            + self.g * np.outer(self.twist @ r, self.projection_axis)
        )

    def to_spec(self) -> GeneratorSpec:
        if isinstance(self.params, Lor63Params):
            return GeneratorSpec(model="lor63", lor63=self.params)
        if isinstance(self.params, GPParams):
            return GeneratorSpec(model="gp", gp=self.params)
        return GeneratorSpec(
            model="custom",
            linear=[[float(v) for v in row] for row in self.linear],
            projection_axis=(
                float(self.projection_axis[0]),
                float(self.projection_axis[1]),
                float(self.projection_axis[2]),
            ),
            twist_axis=self.twist_axis,
            g=self.g,
        )


class GeneratorSpec(BaseModel):
    """JSON form of a generator: a named model, or an explicit ``L``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    model: Literal["lor63", "gp", "custom"] = "lor63"
    lor63: Lor63Params = Field(default_factory=Lor63Params)
    gp: GPParams = Field(default_factory=GPParams)
    linear: list[list[float]] | None = None
    projection_axis: tuple[float, float, float] = (1.0, 0.0, 0.0)
    twist_axis: Axis = Axis.X
    g: float = 0.0

    @model_validator(mode="after")
    def _custom_needs_linear(self) -> GeneratorSpec:
        if self.model == "custom" and self.linear is None:
            raise ValueError("custom generator requires an explicit 'linear' matrix")
        return self

    def build(self) -> TorsionGenerator:
        if self.model == "lor63":
            return lor63_generator(self.lor63)
        if self.model == "gp":
            return gp_generator(self.gp)
        assert self.linear is not None
        return custom_generator(
            np.array(self.linear), self.projection_axis, self.g, self.twist_axis
        )


def lor63_generator(p: Lor63Params | None = None) -> TorsionGenerator:
    """Lorenz-63 field with the nonlinearity scaled by ``g`` and x-axis torsion."""
    p = p or Lor63Params()
    linear = np.array(
        [
            [-p.sigma, p.sigma, 0.0],
            [p.rho, -1.0, 0.0],
            [0.0, 0.0, -p.beta],
        ]
    )
    return TorsionGenerator(
        linear=linear,
        g=p.g,
        twist_axis=Axis.X,
        projection_axis=Axis.X.unit,
        name="lor63",
        params=p,
    )


def gp_generator(p: GPParams | None = None) -> TorsionGenerator:
    """GP butterfly: ``m lambda_4`` plus z-axis torsion."""
    p = p or GPParams()
    return TorsionGenerator(
        linear=p.m * gell_mann(4),
        g=p.g,
        twist_axis=Axis.Z,
        projection_axis=Axis.Z.unit,
        name="gp",
        params=p,
    )


def custom_generator(
    linear: ArrayLike,
    projection_axis: ArrayLike,
    g: float,
    twist_axis: Axis | str,
) -> TorsionGenerator:
    return TorsionGenerator(
        linear=np.asarray(linear, dtype=float),
        g=g,
        twist_axis=_axis(twist_axis),
        projection_axis=np.asarray(projection_axis, dtype=float),
    )


def vector_field(gen: TorsionGenerator, r: BlochVector | ArrayLike) -> NDArray[np.float64]:
    return gen.flow(as_array(r))


def jacobian(gen: TorsionGenerator, r: BlochVector | ArrayLike) -> Mat3:
    """Exact derivative of ``r -> G(r) r``: ``L + g (e.r) J + g (J r) e^T``."""
    return gen.flow_jacobian(as_array(r))


def decompose(linear: ArrayLike) -> tuple[Mat3, Mat3]:
    """Symmetric and antisymmetric parts ``(L+, L-)`` of a linear part."""
    m = np.asarray(linear, dtype=float)
    return (m + m.T) / 2, (m - m.T) / 2


@dataclass(frozen=True, eq=False)
class Lor63Decomposition:
    """Closed form ``L+ = ((rho+sigma)/2) lambda_1 - D``, ``L- = ((rho-sigma)/2) J_z``."""

    symmetric: Mat3
    antisymmetric: Mat3
    dissipator: Mat3


def lor63_decomposition(p: Lor63Params | None = None) -> Lor63Decomposition:
    p = p or Lor63Params()
    dissipator = np.diag([p.sigma, 1.0, p.beta])
    return Lor63Decomposition(
        symmetric=((p.rho + p.sigma) / 2) * gell_mann(1) - dissipator,
        antisymmetric=((p.rho - p.sigma) / 2) * so3_generator(Axis.Z),
        dissipator=dissipator,
    )


def _axis(axis: Axis | str) -> Axis:
    try:
        return Axis(str(axis).lower())
    except ValueError:
        raise ValidationError(f"axis must be one of x, y, z, got {axis!r}") from None
