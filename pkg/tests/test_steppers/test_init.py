"""Tests for stepper initialization."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from lorenz_qubit.base import IntegratorConfig
from lorenz_qubit.errors import ValidationError
from lorenz_qubit.steppers import DormandPrinceStepper, RK4Stepper, init_stepper


class TestInitStepper:
    def test_init_rk4(self) -> None:
        stepper = init_stepper(IntegratorConfig(method="rk4"))
        assert isinstance(stepper, RK4Stepper)
        assert not stepper.adaptive
        assert stepper.order == 4

    def test_init_rk45(self) -> None:
        """Tolerances are taken from the config."""
        stepper = init_stepper(IntegratorConfig(method="rk45", rel_tol=1e-6, abs_tol=1e-8))
        assert isinstance(stepper, DormandPrinceStepper)
        assert stepper.adaptive
        assert stepper.rel_tol == 1e-6
        assert stepper.abs_tol == 1e-8

    def test_default_is_rk45(self) -> None:
        assert isinstance(init_stepper(IntegratorConfig()), DormandPrinceStepper)

    def test_init_invalid_method(self) -> None:
        config = IntegratorConfig.model_construct(method="euler")
        with pytest.raises(ValidationError, match="method"):
            init_stepper(config)

    def test_config_rejects_unknown_method(self) -> None:
        with pytest.raises(ValueError):
            IntegratorConfig(method="euler")

    def test_config_rejects_non_positive_step(self) -> None:
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.0)
