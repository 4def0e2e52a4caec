"""Qubit state representations and scalar observables.

A state is carried either as a Bloch vector ``r = (x, y, z)`` or as the 2x2 density
matrix ``X = (I + r.sigma) / 2``. Unphysical states (``|r| > 1``) are representable so
that containment can be measured; nothing here clamps them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import entr

from lorenz_qubit.errors import UnphysicalStateError, ValidationError

PHYSICAL_TOL = 1e-9
MATRIX_TOL = 1e-12

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, values: ArrayLike) -> BlochVector:
        x, y, z = (float(v) for v in np.asarray(values, dtype=float).reshape(3))
        return cls(x, y, z)

    @property
    def array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.array)))

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 complex matrix; Hermiticity and unit trace are checked, not assumed."""

    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"density matrix must be 2x2, got shape {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]]) -> DensityMatrix:
        return cls(np.array(rows, dtype=complex))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass(frozen=True)
class StateCheckReport:
    hermiticity_error: float
    trace_error: float
    bloch_norm: float
    physical: bool


def as_array(r: BlochVector | ArrayLike) -> NDArray[np.float64]:
    if isinstance(r, BlochVector):
        return r.array
    return np.asarray(r, dtype=float).reshape(3)


def bloch_components(matrix: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """``tr(X sigma_a)`` for a = x, y, z, without validation."""
    upper, lower = matrix[0, 1], matrix[1, 0]
    return np.array(
        [upper + lower, 1j * (upper - lower), matrix[0, 0] - matrix[1, 1]],
        dtype=complex,
    )


def bloch_from_density(density: DensityMatrix, tol: float = MATRIX_TOL) -> BlochVector:
    herm = density.hermiticity_error()
    if herm > tol:
        raise ValidationError(f"density matrix is not Hermitian (error {herm:.3e})")
    components = bloch_components(density.matrix)
    residue = float(np.max(np.abs(components.imag)))
    if residue > tol:
        raise ValidationError(f"Bloch components have imaginary residue {residue:.3e}")
    return BlochVector.from_array(components.real)


def density_from_bloch(r: BlochVector | ArrayLike) -> DensityMatrix:
    x, y, z = as_array(r)
    # The smaller diagonal entry is 1 minus the larger one (exact by Sterbenz), so the
    # trace is exactly 1; the off-diagonal pair is an exact conjugate pair.
    if z >= 0:
        upper = (1.0 + z) / 2
        lower = 1.0 - upper
    else:
        lower = (1.0 - z) / 2
        upper = 1.0 - lower
    return DensityMatrix(
        np.array(
            [
                [upper, complex(x, -y) / 2],
                [complex(x, y) / 2, lower],
            ],
            dtype=complex,
        )
    )


def purity(r: BlochVector | ArrayLike) -> float:
    n = float(np.linalg.norm(as_array(r)))
    return (1.0 + n * n) / 2


def von_neumann_entropy(r: BlochVector | ArrayLike, tol: float = PHYSICAL_TOL) -> float:
    """Entropy in nats of the state with Bloch vector ``r``."""
    n = float(np.linalg.norm(as_array(r)))
    if n > 1.0 + tol:
        raise UnphysicalStateError(f"|r| = {n:.12f} exceeds 1 + {tol:g}")
    return float(_entropy_of_norm(np.array([min(n, 1.0)]))[0])


def check_state(
    density: DensityMatrix,
    tol: float = PHYSICAL_TOL,
    matrix_tol: float = MATRIX_TOL,
) -> StateCheckReport:
    hermiticity_error = density.hermiticity_error()
    trace_error = abs(density.trace - 1.0)
    bloch_norm = float(np.linalg.norm(bloch_components(density.matrix).real))
    return StateCheckReport(
        hermiticity_error=hermiticity_error,
        trace_error=trace_error,
        bloch_norm=bloch_norm,
        physical=(
            bloch_norm <= 1.0 + tol
            and trace_error <= matrix_tol
            and hermiticity_error <= matrix_tol
        ),
    )


def purity_of_norm(norms: NDArray[np.float64]) -> NDArray[np.float64]:
    return (1.0 + norms * norms) / 2


def entropy_of_norm(
    norms: NDArray[np.float64], tol: float = PHYSICAL_TOL
) -> NDArray[np.float64]:
    """Vectorised entropy; NaN marks samples beyond ``1 + tol``."""
    out = _entropy_of_norm(np.minimum(norms, 1.0))
    out[norms > 1.0 + tol] = np.nan
    return out


def _entropy_of_norm(norms: NDArray[np.float64]) -> NDArray[np.float64]:
    p = (1.0 + norms) / 2
    return np.asarray(entr(p) + entr(1.0 - p), dtype=float)
