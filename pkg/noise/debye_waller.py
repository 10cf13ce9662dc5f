# noise/debye_waller.py
from __future__ import annotations

import math

import numpy as np
from scipy.special import eval_laguerre

from models.noise import DebyeWallerParams


def debye_waller_factor(n_com: int, eta_com: float) -> float:
    """
    Rabi-frequency reduction exp(-eta^2 / 2) L_n(eta^2) from a spectator mode in Fock state n.
    """
    if n_com < 0:
        raise ValueError(f"Fock level must be non-negative, got {n_com}")
    if eta_com < 0:
        raise ValueError(f"Lamb-Dicke parameter must be non-negative, got {eta_com}")
    x = eta_com * eta_com
    return float(math.exp(-0.5 * x) * eval_laguerre(n_com, x))


def debye_waller_thermal_mean(n_bar: float, eta_com: float) -> float:
    """
    Thermal average of the factor; the Laguerre generating function gives
    exp(-eta^2 (n_bar + 1/2)) in closed form.
    """
    if n_bar < 0:
        raise ValueError(f"mean occupation must be non-negative, got {n_bar}")
    return math.exp(-eta_com * eta_com * (n_bar + 0.5))


def sample_debye_waller(params: DebyeWallerParams, rng: np.random.Generator) -> tuple[int, float]:
    """
    Draws a thermal COM Fock level and the sideband multiplier it implies,
    relative to the thermal mean (the calibration absorbs the mean).
    """
    n_com = int(rng.geometric(1.0 / (1.0 + params.n_bar_com))) - 1
    factor = debye_waller_factor(n_com, params.eta_com)
    return n_com, factor / debye_waller_thermal_mean(params.n_bar_com, params.eta_com)
