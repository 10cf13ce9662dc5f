# models/errors.py
from __future__ import annotations


class SimulationError(Exception):
    """Base class for every failure raised by the simulator."""


class ConfigError(SimulationError):
    """A run configuration failed validation before any computation started."""

    def __init__(self, message: str, key_path: str = ''):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}" if key_path else message)


class PropagationError(SimulationError):
    """The integrator could not advance the state."""

    def __init__(
        self,
        detail: str,
        t: float | None = None,
        segment: int | None = None,
        worst_local_error: float | None = None,
    ):
        self.detail = detail
        self.t = t
        self.segment = segment
        self.worst_local_error = worst_local_error
        prefix = f"segment {segment}: " if segment is not None else ''
        suffix = f" (t = {t:.6e} s)" if t is not None else ''
        super().__init__(f"{prefix}{detail}{suffix}")

    def at_segment(self, segment: int) -> PropagationError:
        """Same failure, re-labelled with the pulse segment it happened in."""
        return type(self)(self.detail, t=self.t, segment=segment, worst_local_error=self.worst_local_error)


class PositivityError(PropagationError):
    """The density operator acquired an eigenvalue below the allowed floor."""


class FrameError(SimulationError):
    """The dressed frame was requested where it is not defined."""


class CalibrationError(SimulationError):
    """The sideband amplitude search did not reach the fidelity threshold."""


class FitError(SimulationError):
    """A readout or parity fit could not be performed on the given data."""
