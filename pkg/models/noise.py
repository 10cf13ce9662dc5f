# models/noise.py
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field

from core.constants import N_BAR_COM
from core.geometry import lamb_dicke
from models.params import ModeGeometry
from models.params import Variant

NoiseSource = Literal['spontaneous_emission', 'spam', 'carrier', 'heating', 'debye_waller', 'sideband']

NOISE_SOURCES: tuple[NoiseSource, ...] = (
    'spontaneous_emission', 'spam', 'carrier', 'heating', 'debye_waller', 'sideband',
)

# Error-budget rows, in table order.
BUDGET_LINES: tuple[str, ...] = (
    'Spontaneous emission',
    'State preparation and detection',
    'Carrier drive infidelities',
    'Heating and motion fluctuation',
    'Fast oscillation term',
    'Imperfect sideband drive',
)

# Measured values the simulated budget is compared against.
REFERENCE_BUDGET: dict[Variant, dict[str, float]] = {
    'microwave': {
        'Spontaneous emission': 2.8e-3,
        'State preparation and detection': 9.1e-3,
        'Carrier drive infidelities': 1.3e-3,
        'Heating and motion fluctuation': 10e-3,
        'Fast oscillation term': 3e-3,
        'Imperfect sideband drive': 1e-3,
    },
    'laser': {
        'Spontaneous emission': 19e-3,
        'State preparation and detection': 17e-3,
        'Carrier drive infidelities': 16e-3,
        'Heating and motion fluctuation': 6e-3,
        'Fast oscillation term': 1e-3,   # quoted as an upper bound
        'Imperfect sideband drive': 1e-3,
    },
}

# Targets for the spontaneous-emission rate calibration.
SE_TARGET_ERROR: dict[Variant, float] = {'microwave': 2.8e-3, 'laser': 19e-3}

# Inputs reverse-engineered to land on the budget; never measured values.
CALIBRATED_FIELDS = ('heating_rate', 'carrier_slow_sigma', 'carrier_fast_sigma',
                     'sideband_intensity_sigma', 'pointing_sigma', 'se_rate_per_ion')


class DebyeWallerParams(BaseModel):
    """Thermal spectator (COM) mode that rescales the sideband Rabi frequency."""
    model_config = ConfigDict(frozen=True)

    n_bar_com: float = Field(default=N_BAR_COM, ge=0)
    eta_com: float = Field(ge=0)

    @classmethod
    def default(cls) -> DebyeWallerParams:
        com = ModeGeometry.com()
        return cls(n_bar_com=N_BAR_COM, eta_com=lamb_dicke(com) * com.xi[0])


class NoiseModel(BaseModel):
    """
    Every error channel of the gate. All zero means a noise-free run.

    Rates are per second, sigmas are relative (fractional) standard deviations.
    """
    model_config = ConfigDict(frozen=True)

    heating_rate: float = Field(default=0.0, ge=0)
    se_rate_per_ion: float = Field(default=0.0, ge=0)
    se_raman_fraction: float = Field(default=0.5, ge=0, le=1)
    carrier_slow_sigma: float = Field(default=0.0, ge=0)
    carrier_fast_sigma: float = Field(default=0.0, ge=0)
    carrier_fast_tau: float = Field(default=10e-6, gt=0)
    sideband_intensity_sigma: float = Field(default=0.0, ge=0)
    pointing_sigma: float = Field(default=0.0, ge=0)
    spam_error: float = Field(default=0.0, ge=0, le=1)
    debye_waller: DebyeWallerParams | None = None

    @property
    def is_dissipative(self) -> bool:
        return self.heating_rate > 0 or self.se_rate_per_ion > 0

    @property
    def is_stochastic(self) -> bool:
        return (
            self.carrier_slow_sigma > 0
            or self.carrier_fast_sigma > 0
            or self.sideband_intensity_sigma > 0
            or self.pointing_sigma > 0
            or (self.debye_waller is not None and self.debye_waller.eta_com > 0)
        )

    def isolate(self, *sources: NoiseSource) -> NoiseModel:
        """Copy with every channel outside `sources` switched off."""
        keep = set(sources)
        quiet = NoiseModel(se_raman_fraction=self.se_raman_fraction, carrier_fast_tau=self.carrier_fast_tau)
        update = {}
        if 'spontaneous_emission' in keep:
            update['se_rate_per_ion'] = self.se_rate_per_ion
        if 'spam' in keep:
            update['spam_error'] = self.spam_error
        if 'carrier' in keep:
            update['carrier_slow_sigma'] = self.carrier_slow_sigma
            update['carrier_fast_sigma'] = self.carrier_fast_sigma
        if 'heating' in keep:
            update['heating_rate'] = self.heating_rate
        if 'debye_waller' in keep:
            update['debye_waller'] = self.debye_waller
        if 'sideband' in keep:
            update['sideband_intensity_sigma'] = self.sideband_intensity_sigma
            update['pointing_sigma'] = self.pointing_sigma
        return quiet.model_copy(update=update)

    def without_spam(self) -> NoiseModel:
        return self.model_copy(update={'spam_error': 0.0})

    @classmethod
    def preset(cls, variant: Variant) -> NoiseModel:
        """Channel strengths reproducing the measured error budget of a variant."""
        if variant == 'microwave':
            return cls(
                heating_rate=100.0,
                se_rate_per_ion=9.0,
                carrier_slow_sigma=0.005,
                carrier_fast_sigma=0.0035,
                sideband_intensity_sigma=0.015,
                pointing_sigma=0.013,
                spam_error=9.1e-3,
                debye_waller=DebyeWallerParams.default(),
            )
        return cls(
            heating_rate=100.0,
            se_rate_per_ion=145.0,
            carrier_slow_sigma=0.01,
            carrier_fast_sigma=0.0088,
            sideband_intensity_sigma=0.015,
            pointing_sigma=0.013,
            spam_error=17e-3,
            debye_waller=DebyeWallerParams.default(),
        )


class NoiseDraw(BaseModel):
    """
    One Monte-Carlo realisation of the fluctuating drive parameters.

    carrier_fast holds piecewise-constant multipliers on an absolute grid of
    width fast_tau starting at t = 0; the last value is held past the end.
    """
    model_config = ConfigDict(frozen=True)

    carrier_slow: float = 1.0
    carrier_fast: tuple[float, ...] = ()
    fast_tau: float = Field(default=10e-6, gt=0)
    sideband: float = 1.0
    n_com: int | None = None
    debye_waller: float = 1.0

    @classmethod
    def nominal(cls) -> NoiseDraw:
        return cls()

    def _fast_index(self, t: float) -> int:
        return min(max(int(math.floor(t / self.fast_tau)), 0), len(self.carrier_fast) - 1)

    def carrier_multiplier(self, t: float) -> float:
        fast = self.carrier_fast[self._fast_index(t)] if self.carrier_fast else 1.0
        return self.carrier_slow * fast

    @property
    def sideband_multiplier(self) -> float:
        return self.sideband * self.debye_waller

    def breakpoints(self, t_start: float, t_end: float) -> list[float]:
        """Grid points strictly inside (t_start, t_end) where the fast multiplier changes."""
        if len(self.carrier_fast) < 2 or t_end <= t_start:
            return []
        first = max(math.floor(t_start / self.fast_tau), 0) + 1
        edges = (k * self.fast_tau for k in range(first, len(self.carrier_fast)))
        return [e for e in edges if t_start < e < t_end]


class BudgetEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    line: str
    infidelity: float = Field(ge=0)
    reference: float | None = None
    calibrated: bool = False
    components: dict[str, float] = Field(default_factory=dict)


class ErrorBudget(BaseModel):
    """Per-source infidelities next to the measured reference column."""
    model_config = ConfigDict(frozen=True)

    variant: Variant
    entries: tuple[BudgetEntry, ...]
    total: float = Field(ge=0)
    diagnostics: dict[str, float] = Field(default_factory=dict)

    @property
    def by_line(self) -> dict[str, float]:
        return {e.line: e.infidelity for e in self.entries}

    @property
    def reference_total(self) -> float:
        return math.fsum(REFERENCE_BUDGET[self.variant].values())

    def as_table(self) -> str:
        width = max(len(line) for line in BUDGET_LINES) + 4
        rows = [f"{'':4}{'Infidelities/Errors':<{width}}{'simulated':>12}{'measured':>12}"]
        for idx, entry in enumerate(self.entries, start=1):
            ref = f"{entry.reference:.1e}" if entry.reference is not None else '-'
            tag = ' *' if entry.calibrated else ''
            rows.append(f"{idx:>2}. {entry.line:<{width}}{entry.infidelity:>12.2e}{ref:>12}{tag}")
            for name, value in entry.components.items():
                rows.append(f"{'':4}{'  ' + name:<{width}}{value:>12.2e}")
        rows.append(f"{'':4}{'Total (all sources on)':<{width}}{self.total:>12.2e}{self.reference_total:>12.1e}")
        rows.append("(* calibrated input, not a prediction)")
        return '\n'.join(rows)
