# dynamics/jumps.py
from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator

from core.operators import SIGMA_MINUS
from core.operators import SIGMA_PLUS
from core.operators import SIGMA_Z
from core.operators import embed
from core.operators import motion_operators
from models.params import FockCutoff


class JumpChannel(BaseModel):
    """One dissipator gamma * (L rho L_dag - {L_dag L, rho} / 2)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    operator: np.ndarray
    rate: float = Field(ge=0)

    @field_validator('operator', mode='before')
    @classmethod
    def _freeze(cls, value: Any) -> np.ndarray:
        arr = np.array(value, dtype=complex, copy=True)
        arr.setflags(write=False)
        return arr


class JumpOperatorSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    channels: tuple[JumpChannel, ...] = ()

    @property
    def active(self) -> tuple[JumpChannel, ...]:
        return tuple(ch for ch in self.channels if ch.rate > 0)

    @property
    def is_empty(self) -> bool:
        return not self.active

    def __add__(self, other: JumpOperatorSet) -> JumpOperatorSet:
        return JumpOperatorSet(channels=self.channels + other.channels)


def heating_jumps(rate_quanta_per_s: float, cutoff: FockCutoff) -> JumpOperatorSet:
    """
    Symmetric heating {(a_dag, G), (a, G)}: d<n>/dt = G at every n below the cutoff.
    """
    if rate_quanta_per_s < 0:
        raise ValueError(f"heating rate must be non-negative, got {rate_quanta_per_s}")
    if rate_quanta_per_s == 0:
        return JumpOperatorSet()
    lowering, raising = motion_operators(cutoff)
    return JumpOperatorSet(channels=(
        JumpChannel(label='heating_up', operator=raising, rate=rate_quanta_per_s),
        JumpChannel(label='heating_down', operator=lowering, rate=rate_quanta_per_s),
    ))


def spontaneous_emission_jumps(
    rate_per_ion: float,
    raman_fraction: float,
    cutoff: FockCutoff | None,
) -> JumpOperatorSet:
    """
    Per ion: Rayleigh dephasing sigma_z at (1 - f) * rate, Raman flips
    sigma_plus and sigma_minus at f * rate / 2 each.

    cutoff=None builds the channels on the bare two-spin space.
    """
    if rate_per_ion < 0:
        raise ValueError(f"scattering rate must be non-negative, got {rate_per_ion}")
    if not 0.0 <= raman_fraction <= 1.0:
        raise ValueError(f"Raman fraction must lie in [0, 1], got {raman_fraction}")
    if rate_per_ion == 0:
        return JumpOperatorSet()

    rayleigh = (1.0 - raman_fraction) * rate_per_ion
    raman = 0.5 * raman_fraction * rate_per_ion
    channels = []
    for ion, site in ((1, 'ion1'), (2, 'ion2')):
        channels.append(JumpChannel(label=f'rayleigh_{ion}', operator=embed(SIGMA_Z, site, cutoff), rate=rayleigh))
        channels.append(JumpChannel(label=f'raman_up_{ion}', operator=embed(SIGMA_PLUS, site, cutoff), rate=raman))
        channels.append(JumpChannel(label=f'raman_down_{ion}', operator=embed(SIGMA_MINUS, site, cutoff), rate=raman))
    return JumpOperatorSet(channels=tuple(channels))
