"""Exceptions raised by the library. Only ``__main__`` turns them into exit codes."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lorenz_qubit.state import BlochVector


class LorenzQubitError(Exception):
    pass


class ValidationError(LorenzQubitError, ValueError):
    """Input rejected before any computation."""


class UnphysicalStateError(ValidationError):
    """State lies outside the Bloch ball where a physical state is required."""


class NonFiniteStateError(LorenzQubitError, ArithmeticError):
    """Integration produced NaN/Inf or the step size collapsed."""


class DegenerateStepError(LorenzQubitError):
    """Newton Jacobian is singular at the current iterate."""


class ConvergenceError(LorenzQubitError):
    def __init__(self, message: str, best: BlochVector, residual: float):
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.best = best
        self.residual = residual


class UsageError(LorenzQubitError):
    """Command line misuse."""


class StepLimitError(LorenzQubitError):
    """More accepted steps were needed than ``max_steps`` allows."""


class OutputError(LorenzQubitError, OSError):
    """Writing or reading an artifact failed; the message names the path."""
