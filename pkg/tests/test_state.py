"""Tests for state module."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lorenz_qubit.errors import UnphysicalStateError, ValidationError
from lorenz_qubit.state import (
    BlochVector,
    DensityMatrix,
    bloch_from_density,
    check_state,
    density_from_bloch,
    entropy_of_norm,
    purity,
    von_neumann_entropy,
)


class TestDensityFromBloch:
    def test_maximally_mixed(self) -> None:
        """The origin maps to I/2."""
        x = density_from_bloch(BlochVector(0.0, 0.0, 0.0))
        np.testing.assert_array_equal(x.matrix, np.eye(2) / 2)

    def test_plus_state(self) -> None:
        x = density_from_bloch(BlochVector(1.0, 0.0, 0.0))
        np.testing.assert_array_equal(x.matrix, [[0.5, 0.5], [0.5, 0.5]])

    def test_trace_is_exactly_one(self) -> None:
        rng = np.random.default_rng(3)
        for r in rng.uniform(-1, 1, size=(200, 3)):
            assert density_from_bloch(r).trace == 1.0

    def test_exactly_hermitian(self) -> None:
        x = density_from_bloch(BlochVector(0.3, -0.4, 0.1))
        assert x.hermiticity_error() == 0.0

    def test_unphysical_vector_is_representable(self) -> None:
        """|r| > 1 is allowed; containment is measured elsewhere."""
        x = density_from_bloch(BlochVector(0.0, 0.0, 1.5))
        assert x.matrix[1, 1] == pytest.approx(-0.25)


class TestBlochFromDensity:
    def test_inverse_of_density_from_bloch(self) -> None:
        r = BlochVector(0.12, 0.12, 0.3)
        back = bloch_from_density(density_from_bloch(r))
        assert back.x == pytest.approx(r.x, abs=1e-15)
        assert back.y == pytest.approx(r.y, abs=1e-15)
        assert back.z == pytest.approx(r.z, abs=1e-15)

    def test_round_trip_over_the_ball(self) -> None:
        """1000 random r in the unit ball come back to 1e-14 componentwise."""
        rng = np.random.default_rng(37)
        points = rng.normal(size=(1000, 3))
        radii = rng.uniform(0, 1, 1000) ** (1 / 3)
        points *= (radii / np.linalg.norm(points, axis=1))[:, None]
        for r in points:
            back = bloch_from_density(density_from_bloch(r)).array
            np.testing.assert_allclose(back, r, rtol=0, atol=1e-14)

    def test_basis_pole(self) -> None:
        """|0><0| -> (0, 0, 1)."""
        back = bloch_from_density(DensityMatrix.from_rows([[1, 0], [0, 0]]))
        assert tuple(back) == (0.0, 0.0, 1.0)

    def test_plus_state(self) -> None:
        back = bloch_from_density(DensityMatrix.from_rows([[0.5, 0.5], [0.5, 0.5]]))
        assert tuple(back) == (1.0, 0.0, 0.0)

    def test_non_hermitian_rejected(self) -> None:
        x = DensityMatrix.from_rows([[1, 0.5], [0, 0]])
        with pytest.raises(ValidationError, match="not Hermitian"):
            bloch_from_density(x)

    def test_wrong_shape_rejected(self) -> None:
        with pytest.raises(ValidationError, match="2x2"):
            DensityMatrix(np.eye(3, dtype=complex))

    def test_matrix_is_read_only(self) -> None:
        x = density_from_bloch(BlochVector(0.1, 0.2, 0.3))
        with pytest.raises(ValueError):
            x.matrix[0, 0] = 1.0


class TestObservables:
    def test_purity_of_pure_and_mixed(self) -> None:
        assert purity(BlochVector(0.0, 0.0, 1.0)) == 1.0
        assert purity(BlochVector(0.0, 0.0, 0.0)) == 0.5

    def test_entropy_at_origin_is_ln2(self) -> None:
        assert von_neumann_entropy(BlochVector(0.0, 0.0, 0.0)) == 0.6931471805599453

    def test_entropy_of_pure_state_is_zero(self) -> None:
        assert von_neumann_entropy(BlochVector(0.6, 0.0, 0.8)) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_entropy_closed_form(self) -> None:
        n = 0.5
        p = (1 + n) / 2
        expected = -p * math.log(p) - (1 - p) * math.log(1 - p)
        assert von_neumann_entropy([0.0, n, 0.0]) == pytest.approx(expected, rel=1e-14)

    def test_entropy_tolerates_roundoff_above_one(self) -> None:
        assert von_neumann_entropy([0.0, 0.0, 1.0 + 1e-12]) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_entropy_rejects_unphysical(self) -> None:
        with pytest.raises(UnphysicalStateError):
            von_neumann_entropy(BlochVector(0.0, 0.0, 1.1))

    def test_vectorised_entropy_marks_unphysical_with_nan(self) -> None:
        out = entropy_of_norm(np.array([0.0, 1.0, 1.2]))
        assert out[0] == 0.6931471805599453
        assert out[1] == pytest.approx(0.0, abs=1e-15)
        assert math.isnan(out[2])


class TestCheckState:
    def test_physical_state(self) -> None:
        report = check_state(density_from_bloch(BlochVector(0.1, 0.2, 0.3)))
        assert report.physical
        assert report.trace_error == 0.0
        assert report.bloch_norm == pytest.approx(math.sqrt(0.14))

    def test_negative_eigenvalue(self) -> None:
        """diag(1.5, -0.5) has unit trace but is not positive."""
        report = check_state(DensityMatrix.from_rows([[1.5, 0], [0, -0.5]]))
        assert not report.physical
        assert report.trace_error == 0.0
        assert report.bloch_norm == 2.0

    def test_maximally_mixed(self) -> None:
        report = check_state(DensityMatrix.from_rows([[0.5, 0], [0, 0.5]]))
        assert report.physical
        assert report.trace_error == report.hermiticity_error == report.bloch_norm == 0.0

    def test_documented_norm(self) -> None:
        report = check_state(density_from_bloch(BlochVector(0.2, 0.1, -0.3)))
        assert report.physical
        assert report.bloch_norm == pytest.approx(0.374166, abs=1e-6)

    def test_outside_ball(self) -> None:
        report = check_state(density_from_bloch(BlochVector(1.0, 1.0, 0.0)))
        assert not report.physical
        assert report.bloch_norm == pytest.approx(math.sqrt(2))


class TestBlochVector:
    def test_iterates_components(self) -> None:
        assert tuple(BlochVector(1.0, 2.0, 3.0)) == (1.0, 2.0, 3.0)

    def test_from_array(self) -> None:
        r = BlochVector.from_array(np.array([0.1, 0.2, 0.3]))
        assert r == BlochVector(0.1, 0.2, 0.3)
        assert r.is_finite()

    def test_not_finite(self) -> None:
        assert not BlochVector(float("nan"), 0.0, 0.0).is_finite()
