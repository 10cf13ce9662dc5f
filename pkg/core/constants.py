# core/constants.py
"""
Physical constants and the experimental reference values of the gate.

CODATA values come from scipy.constants so that every derived quantity
(the Lamb-Dicke parameter in particular) is reproducible from this table.
"""
from __future__ import annotations

import math

from scipy import constants as codata

HBAR = codata.hbar
ATOMIC_MASS_UNIT = codata.atomic_mass

BE9_MASS_U = 9.0121831
BE9_MASS = BE9_MASS_U * ATOMIC_MASS_UNIT

RAMAN_WAVELENGTH = 313e-9
STRETCH_FREQUENCY_HZ = 4.5e6
COM_FREQUENCY_HZ = 2.6e6

N_BAR_STRETCH = 0.05
N_BAR_COM = 0.2

# Gate timings quoted for the two carrier implementations.
MICROWAVE_SIDEBAND_TIME = 250e-6      # 4π/δ
MICROWAVE_CARRIER_PI_TIME = 11e-6
LASER_GATE_TIME = 105e-6              # 2π/δ
LASER_CARRIER_PI_TIME = 5e-6

# Spin basis indices: |↑⟩ = 0, |↓⟩ = 1. Two-ion index is 2·s1 + s2.
UP = 0
DOWN = 1


def raman_delta_k(wavelength: float = RAMAN_WAVELENGTH) -> float:
    """Difference wave-vector of the 90° Raman pair along the trap axis."""
    return 2.0 * math.sqrt(2.0) * math.pi / wavelength


def angular(frequency_hz: float) -> float:
    return 2.0 * math.pi * frequency_hz
