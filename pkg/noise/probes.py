# noise/probes.py
from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy.optimize import brentq

from core.states import initial_state
from dynamics.ensemble import monte_carlo_ensemble
from helper.workers import map_ordered
from measurement.fidelity import bell_target_fidelity
from measurement.populations import DD
from measurement.populations import UU
from models.config import IntegratorConfig
from models.errors import CalibrationError
from models.noise import NoiseDraw
from models.noise import NoiseModel
from models.params import FockCutoff
from models.params import GateParams
from models.params import Variant
from noise.sampling import sample_noise
from os_env import DEFAULT_SEED
from sequences.calibration import calibrate_sideband_amplitude
from sequences.compiler import carrier_only
from sequences.compiler import gate_sequence
from sequences.runner import run_experiment

logger = logging.getLogger(__name__)

# The carrier never touches the motion, so one extra Fock level is enough.
SPIN_ONLY_CUTOFF = FockCutoff(n_max=1, leakage_tolerance=1.0)

SE_RATE_BRACKET = (1e-2, 1e5)   # per ion, 1/s


def carrier_target(variant: Variant) -> int:
    """
    Two-ion basis index the carrier-only sequence ends in.

    The laser carrier refocuses to |dd>; the microwave echo pi pulse leaves both ions flipped.
    """
    return DD if variant == 'laser' else UU


def _carrier_error(
    variant: Variant,
    params: GateParams,
    draw: NoiseDraw,
    cfg: IntegratorConfig | None,
) -> float:
    spin_only = params.model_copy(update={'cutoff': SPIN_ONLY_CUTOFF})
    seq = carrier_only(gate_sequence(variant, spin_only))
    final = run_experiment(seq, initial_state('dd', cutoff=SPIN_ONLY_CUTOFF), spin_only, cfg=cfg, draw=draw)
    probs = np.real(np.diag(final.spin_density()))
    return float(1.0 - probs[carrier_target(variant)])


def carrier_infidelity_probe(
    variant: Variant,
    params: GateParams,
    noise: NoiseModel,
    *,
    shots: int = 64,
    seed: int = DEFAULT_SEED,
    cfg: IntegratorConfig | None = None,
    workers: int | None = None,
) -> float:
    """
    Plays the gate timing with only the carrier on and returns 1 - P(target).

    Slow and fast carrier amplitude noise enter through per-shot draws; the
    probe averages the error over `shots` realisations.
    """
    carrier_noise = noise.isolate('carrier')
    if not carrier_noise.is_stochastic:
        return _carrier_error(variant, params, NoiseDraw.nominal(), cfg)

    duration = carrier_only(gate_sequence(variant, params)).total_duration
    result = monte_carlo_ensemble(
        lambda draw: _carrier_error(variant, params, draw, cfg),
        lambda rng: sample_noise(carrier_noise, duration, rng),
        shots,
        seed,
        workers,
    )
    logger.info(f"{variant} carrier probe: infidelity {result.mean:.3e} over {shots} shots")
    return float(result.mean)


def gate_spin_state(
    params: GateParams,
    variant: Variant,
    cfg: IntegratorConfig | None = None,
    *,
    model: str = 'rwa',
    noise: NoiseModel | None = None,
    draw: NoiseDraw | None = None,
) -> np.ndarray:
    """Reduced two-ion density matrix after the gate from |dd> x |0>."""
    start = initial_state('dd', cutoff=params.cutoff)
    final = run_experiment(gate_sequence(variant, params), start, params, noise, cfg, model=model, draw=draw)
    return final.spin_density()


def fast_term_infidelity(params: GateParams, variant: Variant, cfg: IntegratorConfig | None = None) -> float:
    """
    Error of the full evolution against the secular one.

    The reference is the dominant eigenvector of the secular spin state, so
    residual secular imperfections do not count as fast-term error.
    """
    reference = gate_spin_state(params, variant, cfg, model='rwa')
    full = gate_spin_state(params, variant, cfg, model='full')
    _, vectors = np.linalg.eigh(reference)
    v = vectors[:, -1]
    return float(max(0.0, 1.0 - np.real(np.vdot(v, full @ v))))


def fast_term_error_scan(
    ratio_grid: Sequence[float],
    variant: Variant,
    params: GateParams | None = None,
    cfg: IntegratorConfig | None = None,
    *,
    calibrate_each: bool = False,
    grid_points: int = 40,
    workers: int | None = None,
) -> list[tuple[float, float]]:
    """
    Infidelity caused by the terms oscillating at 2 Omega_C, per Omega_C / delta.

    The sideband amplitude is calibrated once on the secular model (where it
    does not depend on Omega_C); calibrate_each repeats it per ratio.
    Noise-free and deterministic.
    """
    if not ratio_grid:
        return []
    if any(r <= 0 for r in ratio_grid):
        raise ValueError(f"carrier to detuning ratios must be positive, got {list(ratio_grid)}")
    base = params or GateParams.preset(variant, n_max=8)
    base = calibrate_sideband_amplitude(base.delta, variant, base, cfg, grid_points=grid_points).apply(base)

    def at_ratio(ratio: float) -> tuple[float, float]:
        point = base.model_copy(update={'omega_C': ratio * base.delta})
        if calibrate_each:
            point = calibrate_sideband_amplitude(point.delta, variant, point, cfg, grid_points=grid_points).apply(point)
        value = fast_term_infidelity(point, variant, cfg)
        logger.info(f"fast-term scan: Omega_C/delta = {ratio:g} -> infidelity {value:.3e}")
        return float(ratio), value

    return map_ordered(at_ratio, list(ratio_grid), workers)


def spontaneous_emission_error(
    params: GateParams,
    variant: Variant,
    rate_per_ion: float,
    cfg: IntegratorConfig | None = None,
    *,
    raman_fraction: float = 0.5,
    reference: float | None = None,
) -> float:
    """Bell infidelity added by scattering at the given rate, secular model."""
    if reference is None:
        reference = bell_target_fidelity(gate_spin_state(params, variant, cfg))
    noise = NoiseModel(se_rate_per_ion=rate_per_ion, se_raman_fraction=raman_fraction)
    return max(0.0, reference - bell_target_fidelity(gate_spin_state(params, variant, cfg, noise=noise)))


def calibrate_se_rate(
    params: GateParams,
    variant: Variant,
    target_error: float,
    cfg: IntegratorConfig | None = None,
    *,
    raman_fraction: float = 0.5,
) -> float:
    """
    Per-ion scattering rate whose added Bell infidelity at the gate time equals target_error.

    Raises:
        CalibrationError: the target lies outside what the rate bracket can reach.
    """
    if not 0 < target_error < 0.5:
        raise ValueError(f"target error must lie in (0, 0.5), got {target_error}")
    reference = bell_target_fidelity(gate_spin_state(params, variant, cfg))

    def excess(log_rate: float) -> float:
        rate = math.exp(log_rate)
        return spontaneous_emission_error(
            params, variant, rate, cfg, raman_fraction=raman_fraction, reference=reference,
        ) - target_error

    lo, hi = (math.log(r) for r in SE_RATE_BRACKET)
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo > 0 or f_hi < 0:
        raise CalibrationError(
            f"scattering error {target_error} not bracketed by rates {SE_RATE_BRACKET} "
            f"(errors {f_lo + target_error:.3e}, {f_hi + target_error:.3e})"
        )
    rate = math.exp(brentq(excess, lo, hi, xtol=1e-6))
    logger.info(f"{variant} scattering rate {rate:.4g} /s per ion gives error {target_error:.3e}")
    return rate

