#!/usr/bin/env python3
"""Exceptions raised by framebound."""


class ScenarioError(ValueError):
    """Raised when a scenario or its configuration is invalid."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure."""


class FrameNotStationary(NumericalError):
    """Raised when a rotating frame does not remove the time dependence of the Hamiltonian."""


class StepTooLarge(NumericalError):
    """Raised when a time step does not resolve the fastest frequency of the Hamiltonian."""


class FidelityNeverReached(NumericalError):
    """Raised when the fidelity never drops to the target within the time horizon."""


class ZeroSpeed(NumericalError):
    """Raised when the state is an eigenstate, so its evolution speed is zero."""


class InconsistentReadout(NumericalError):
    """Raised when redundant magnetization readouts disagree."""
