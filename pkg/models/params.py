# models/params.py
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

from core import constants
from core.geometry import lamb_dicke

ModeLabel = Literal['COM', 'stretch']
Variant = Literal['microwave', 'laser']

_XI_TOL = 1e-12


class FockCutoff(BaseModel):
    """Truncation of the motional mode: levels 0..n_max are kept."""
    model_config = ConfigDict(frozen=True)

    n_max: int = Field(default=15, ge=1)
    # Allowed population in the two highest levels before a run is flagged.
    leakage_tolerance: float = Field(default=1e-6, gt=0)

    @property
    def dim(self) -> int:
        return self.n_max + 1


class ModeGeometry(BaseModel):
    """
    One axial normal mode of the two-ion crystal.

    xi holds the normal-mode amplitude of each ion; the stretch mode moves the
    ions out of phase, the COM mode in phase.
    """
    model_config = ConfigDict(frozen=True)

    mode_label: ModeLabel = 'stretch'
    omega_nu: float = Field(gt=0)
    xi: tuple[float, float] = (1 / math.sqrt(2), -1 / math.sqrt(2))
    ion_mass: float = Field(default=constants.BE9_MASS, gt=0)
    delta_k_z: float = Field(default_factory=constants.raman_delta_k, ge=0)

    @model_validator(mode='after')
    def _check_amplitudes(self) -> ModeGeometry:
        xi1, xi2 = self.xi
        if abs(xi1 * xi1 + xi2 * xi2 - 1.0) > _XI_TOL:
            raise ValueError(f"mode amplitudes must satisfy xi1^2 + xi2^2 = 1, got {self.xi}")
        if self.mode_label == 'stretch' and abs(xi1 + xi2) > _XI_TOL:
            raise ValueError(f"stretch mode requires xi1 = -xi2, got {self.xi}")
        if self.mode_label == 'COM' and abs(xi1 - xi2) > _XI_TOL:
            raise ValueError(f"COM mode requires xi1 = xi2, got {self.xi}")
        return self

    @classmethod
    def stretch(cls, frequency_hz: float = constants.STRETCH_FREQUENCY_HZ, **kwargs) -> ModeGeometry:
        amp = 1 / math.sqrt(2)
        return cls(mode_label='stretch', omega_nu=constants.angular(frequency_hz), xi=(amp, -amp), **kwargs)

    @classmethod
    def com(cls, frequency_hz: float = constants.COM_FREQUENCY_HZ, **kwargs) -> ModeGeometry:
        amp = 1 / math.sqrt(2)
        return cls(mode_label='COM', omega_nu=constants.angular(frequency_hz), xi=(amp, amp), **kwargs)


class GateParams(BaseModel):
    """
    Every physical symbol of the lab-frame gate Hamiltonian.

    All frequencies are angular (rad/s). The per-ion sideband Rabi
    frequencies are derived, never stored: Omega_j = Omega_0 * eta * xi_j.
    """
    model_config = ConfigDict(frozen=True)

    omega_C: float = Field(ge=0)
    omega_0_rabi: float = Field(ge=0)
    eta: float = Field(ge=0)
    delta: float = Field(gt=0)
    phi: float = 0.0
    phi_prime: tuple[float, float] = (0.0, 0.0)
    geometry: ModeGeometry = Field(default_factory=ModeGeometry.stretch)
    cutoff: FockCutoff = Field(default_factory=FockCutoff)

    @property
    def omega_j(self) -> tuple[float, float]:
        base = self.omega_0_rabi * self.eta
        return (base * self.geometry.xi[0], base * self.geometry.xi[1])

    @property
    def carrier_pi_time(self) -> float:
        """Resonant carrier flip time pi / (2 Omega_C)."""
        return math.pi / (2.0 * self.omega_C)

    def with_cutoff(self, n_max: int) -> GateParams:
        return self.model_copy(update={'cutoff': self.cutoff.model_copy(update={'n_max': n_max})})

    def replace(self, **changes) -> GateParams:
        """Validated copy with the given fields replaced."""
        return GateParams.model_validate({**self.model_dump(), **changes})

    @classmethod
    def preset(cls, variant: Variant, n_max: int = 15) -> GateParams:
        """
        Quoted experimental operating point of either gate variant.

        The sideband amplitude is the closed-loop value (Omega_1 = delta / (2 sqrt(loops)));
        use the calibration routine for the numerically optimal value.
        """
        geometry = ModeGeometry.stretch()
        eta = lamb_dicke(geometry)
        if variant == 'microwave':
            delta = 4.0 * math.pi / constants.MICROWAVE_SIDEBAND_TIME
            pi_time = constants.MICROWAVE_CARRIER_PI_TIME
            loops = 2
        else:
            delta = 2.0 * math.pi / constants.LASER_GATE_TIME
            pi_time = constants.LASER_CARRIER_PI_TIME
            loops = 1
        omega_1 = delta / (2.0 * math.sqrt(loops))
        return cls(
            omega_C=math.pi / (2.0 * pi_time),
            omega_0_rabi=omega_1 / (eta * geometry.xi[0]),
            eta=eta,
            delta=delta,
            geometry=geometry,
            cutoff=FockCutoff(n_max=n_max),
        )
