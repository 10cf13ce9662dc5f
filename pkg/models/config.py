# models/config.py
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator

from core import constants
from core.geometry import lamb_dicke
from models.noise import DebyeWallerParams
from models.noise import NoiseModel
from models.noise import NoiseSource
from models.params import FockCutoff
from models.params import GateParams
from models.params import ModeGeometry
from models.params import Variant
from os_env import DEFAULT_SEED
from os_env import OUTPUT_DIR

Command = Literal['calibrate', 'evolve', 'parity', 'budget', 'fastscan']
ReadoutMode = Literal['exact', 'sampled']


class IntegratorConfig(BaseModel):
    """Step control handed to scipy's adaptive Runge-Kutta integrators."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    rel_tol: float = Field(default=1e-9, gt=0, le=1e-2)
    abs_tol: float = Field(default=1e-11, gt=0, le=1e-2)
    max_step: float = Field(default=2e-6, gt=0)
    scheme_order: Literal[5, 8] = 8

    def tightened(self, factor: float = 0.5) -> IntegratorConfig:
        return self.model_copy(update={'rel_tol': self.rel_tol * factor, 'abs_tol': self.abs_tol * factor})


class PhysicsConfig(BaseModel):
    """Physical inputs; None keeps the value of the variant preset."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    delta_khz: float | None = Field(default=None, gt=0)
    carrier_pi_time_us: float | None = Field(default=None, gt=0)
    omega_0_khz: float | None = Field(default=None, gt=0)
    stretch_frequency_mhz: float = Field(default=constants.STRETCH_FREQUENCY_HZ / 1e6, gt=0)
    wavelength_nm: float = Field(default=constants.RAMAN_WAVELENGTH * 1e9, gt=0)
    carrier_phase_pi: float = 0.0
    sideband_phase_pi: tuple[float, float] = (0.0, 0.0)
    n_max: int = Field(default=15, ge=1)
    # None: cold for evolve and parity, N_BAR_STRETCH for the budget
    n_bar_stretch: float | None = Field(default=None, ge=0)

    def stretch_occupation(self, default: float = 0.0) -> float:
        return self.n_bar_stretch if self.n_bar_stretch is not None else default

    def to_params(self, variant: Variant) -> GateParams:
        base = GateParams.preset(variant, n_max=self.n_max)
        geometry = ModeGeometry.stretch(
            self.stretch_frequency_mhz * 1e6,
            delta_k_z=constants.raman_delta_k(self.wavelength_nm * 1e-9),
        )
        eta = lamb_dicke(geometry)
        delta = constants.angular(self.delta_khz * 1e3) if self.delta_khz is not None else base.delta
        # keep the per-ion force of the preset unless Omega_0 is given explicitly
        scale = delta / base.delta
        omega_0 = (
            constants.angular(self.omega_0_khz * 1e3)
            if self.omega_0_khz is not None
            else base.omega_0_rabi * base.eta * scale / eta
        )
        omega_C = (
            math.pi / (2.0 * self.carrier_pi_time_us * 1e-6)
            if self.carrier_pi_time_us is not None
            else base.omega_C
        )
        return GateParams(
            omega_C=omega_C,
            omega_0_rabi=omega_0,
            eta=eta,
            delta=delta,
            phi=math.pi * self.carrier_phase_pi,
            phi_prime=(math.pi * self.sideband_phase_pi[0], math.pi * self.sideband_phase_pi[1]),
            geometry=geometry,
            cutoff=FockCutoff(n_max=self.n_max),
        )


class NoiseConfig(BaseModel):
    """Noise channel strengths; None keeps the variant preset."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    overlay: bool = False
    channels: tuple[NoiseSource, ...] = ('spontaneous_emission', 'spam')
    heating_rate_quanta_per_s: float | None = Field(default=None, ge=0)
    se_rate_per_ion_per_s: float | None = Field(default=None, ge=0)
    se_raman_fraction: float | None = Field(default=None, ge=0, le=1)
    carrier_slow_sigma: float | None = Field(default=None, ge=0)
    carrier_fast_sigma: float | None = Field(default=None, ge=0)
    carrier_fast_tau_us: float | None = Field(default=None, gt=0)
    sideband_intensity_sigma: float | None = Field(default=None, ge=0)
    pointing_sigma: float | None = Field(default=None, ge=0)
    spam_error: float | None = Field(default=None, ge=0, le=1)
    n_bar_com: float | None = Field(default=None, ge=0)
    debye_waller: bool = True

    def to_noise(self, variant: Variant) -> NoiseModel:
        preset = NoiseModel.preset(variant)
        update: dict[str, object] = {}
        for key, target in (
            ('heating_rate_quanta_per_s', 'heating_rate'),
            ('se_rate_per_ion_per_s', 'se_rate_per_ion'),
            ('se_raman_fraction', 'se_raman_fraction'),
            ('carrier_slow_sigma', 'carrier_slow_sigma'),
            ('carrier_fast_sigma', 'carrier_fast_sigma'),
            ('sideband_intensity_sigma', 'sideband_intensity_sigma'),
            ('pointing_sigma', 'pointing_sigma'),
            ('spam_error', 'spam_error'),
        ):
            value = getattr(self, key)
            if value is not None:
                update[target] = value
        if self.carrier_fast_tau_us is not None:
            update['carrier_fast_tau'] = self.carrier_fast_tau_us * 1e-6
        if not self.debye_waller:
            update['debye_waller'] = None
        elif self.n_bar_com is not None:
            base = preset.debye_waller or DebyeWallerParams.default()
            update['debye_waller'] = base.model_copy(update={'n_bar_com': self.n_bar_com})
        return NoiseModel.model_validate({**preset.model_dump(), **update})

    def overlay_noise(self, variant: Variant) -> NoiseModel | None:
        """Channels applied on top of evolve and parity runs, or None when off."""
        if not self.overlay:
            return None
        return self.to_noise(variant).isolate(*self.channels)


class ScanConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    evolve_points: int = Field(default=22, ge=2)
    evolve_max_us: float | None = Field(default=None, gt=0)
    parity_points: int = Field(default=24, ge=8)
    fastscan_ratios: tuple[float, ...] = (5.0, 10.0, 20.0, 40.0)
    fastscan_variant: Variant = 'laser'
    calibration_grid: int = Field(default=40, ge=5)
    mc_shots: int = Field(default=64, ge=1)
    include_stretch_thermal: bool = True

    @field_validator('fastscan_ratios')
    @classmethod
    def _positive_ratios(cls, ratios: tuple[float, ...]) -> tuple[float, ...]:
        if any(r <= 0 for r in ratios):
            raise ValueError(f"carrier to detuning ratios must be positive, got {list(ratios)}")
        return ratios


class RunConfig(BaseModel):
    """Fully resolved run configuration; embedded verbatim in every artifact."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    variant: Variant = 'microwave'
    physics: PhysicsConfig = Field(default_factory=PhysicsConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    scan: ScanConfig = Field(default_factory=ScanConfig)
    shots: int = Field(default=500, ge=1)
    mode: ReadoutMode = 'exact'
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    output_dir: str = OUTPUT_DIR
    workers: int | None = Field(default=None, ge=1)

    def params(self) -> GateParams:
        return self.physics.to_params(self.variant)

    def noise_model(self) -> NoiseModel:
        return self.noise.to_noise(self.variant)
