# core/geometry.py
from __future__ import annotations

import math
from typing import TYPE_CHECKING

from core.constants import HBAR

if TYPE_CHECKING:
    from models.params import ModeGeometry


def ground_state_extent(ion_mass: float, omega_nu: float) -> float:
    """z0 = sqrt(hbar / (2 m omega_nu))."""
    if ion_mass <= 0 or omega_nu <= 0:
        raise ValueError(f"ion mass and mode frequency must be positive, got m={ion_mass}, omega={omega_nu}")
    return math.sqrt(HBAR / (2.0 * ion_mass * omega_nu))


def lamb_dicke(geometry: ModeGeometry) -> float:
    """
    Lamb-Dicke parameter eta = delta_k_z * z0 of the mode.

    Raises:
        ValueError: non-positive mass or frequency, or negative wave-number.
    """
    if geometry.delta_k_z < 0:
        raise ValueError(f"delta_k_z must be non-negative, got {geometry.delta_k_z}")
    return geometry.delta_k_z * ground_state_extent(geometry.ion_mass, geometry.omega_nu)
