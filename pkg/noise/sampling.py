# noise/sampling.py
from __future__ import annotations

import math

import numpy as np

from models.noise import NoiseDraw
from models.noise import NoiseModel
from noise.debye_waller import sample_debye_waller


def _multiplier(rng: np.random.Generator, sigma: float) -> float:
    return max(0.0, 1.0 + sigma * float(rng.standard_normal())) if sigma > 0 else 1.0


def sample_noise(noise: NoiseModel, gate_duration: float, rng: np.random.Generator) -> NoiseDraw:
    """
    One realisation of every fluctuating drive parameter.

    The draw order is fixed (slow carrier, fast carrier cells, sideband
    intensity, pointing, COM level) so a generator reproduces the same draw.
    """
    slow = _multiplier(rng, noise.carrier_slow_sigma)

    fast: tuple[float, ...] = ()
    if noise.carrier_fast_sigma > 0:
        cells = int(math.ceil(gate_duration / noise.carrier_fast_tau)) + 1
        values = 1.0 + noise.carrier_fast_sigma * rng.standard_normal(cells)
        fast = tuple(float(v) for v in np.maximum(values, 0.0))

    sideband = _multiplier(rng, noise.sideband_intensity_sigma) * _multiplier(rng, noise.pointing_sigma)

    n_com, dw = None, 1.0
    if noise.debye_waller is not None and noise.debye_waller.eta_com > 0:
        n_com, dw = sample_debye_waller(noise.debye_waller, rng)

    return NoiseDraw(
        carrier_slow=slow,
        carrier_fast=fast,
        fast_tau=noise.carrier_fast_tau,
        sideband=sideband,
        n_com=n_com,
        debye_waller=dw,
    )
