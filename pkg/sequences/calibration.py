# sequences/calibration.py
from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from scipy.optimize import minimize_scalar

from core.states import initial_state
from measurement.fidelity import bell_target_fidelity
from models.config import IntegratorConfig
from models.errors import CalibrationError
from models.params import FockCutoff
from models.params import GateParams
from models.params import Variant
from sequences.compiler import gate_sequence
from sequences.runner import run_experiment

logger = logging.getLogger(__name__)

FIDELITY_THRESHOLD = 0.9999
SEARCH_RANGE = (0.1, 2.0)     # in units of delta / eta
CALIBRATION_CUTOFF = 10


class CalibrationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    variant: Variant
    omega_0_rabi: float
    fidelity: float
    scan: tuple[tuple[float, float], ...]
    evaluations: int

    def apply(self, params: GateParams) -> GateParams:
        return params.model_copy(update={'omega_0_rabi': self.omega_0_rabi})


def gate_fidelity(
    params: GateParams,
    variant: Variant,
    cfg: IntegratorConfig | None = None,
    model: str = 'rwa',
) -> float:
    """Fidelity of the noise-free gate to (|dd> + |uu>)/sqrt(2), starting from |dd> x |0>."""
    start = initial_state('dd', cutoff=params.cutoff)
    final = run_experiment(gate_sequence(variant, params), start, params, cfg=cfg, model=model)
    return bell_target_fidelity(final)


def calibrate_sideband_amplitude(
    delta: float,
    variant: Variant,
    params_base: GateParams,
    cfg: IntegratorConfig | None = None,
    *,
    grid_points: int = 40,
    threshold: float = FIDELITY_THRESHOLD,
) -> CalibrationResult:
    """
    Finds the Omega_0 that maximises the noise-free fidelity to (|dd> + |uu>)/sqrt(2).

    A grid over [0.1, 2] delta/eta locates the first local maximum, which a
    golden-section search then refines to 1e-6 relative tolerance. Runs use
    the secular model from |dd> x |0>.

    Raises:
        CalibrationError: the best fidelity stays below `threshold`.
    """
    n_max = min(params_base.cutoff.n_max, CALIBRATION_CUTOFF)
    base = params_base.model_copy(update={'delta': delta, 'cutoff': FockCutoff(n_max=n_max)})
    scale = delta / base.eta if base.eta > 0 else delta
    trace: list[tuple[float, float]] = []

    def fidelity_at(omega_0: float) -> float:
        value = gate_fidelity(base.model_copy(update={'omega_0_rabi': float(omega_0)}), variant, cfg)
        trace.append((float(omega_0), value))
        return value

    grid = np.linspace(SEARCH_RANGE[0] * scale, SEARCH_RANGE[1] * scale, grid_points)
    values = np.array([fidelity_at(x) for x in grid])

    peak = int(np.argmax(values))
    for i in range(1, grid_points - 1):
        if values[i] >= values[i - 1] and values[i] >= values[i + 1]:
            peak = i
            break
    lo = grid[max(peak - 1, 0)]
    hi = grid[min(peak + 1, grid_points - 1)]

    if 0 < peak < grid_points - 1:
        res = minimize_scalar(
            lambda x: -fidelity_at(x),
            bracket=(lo, grid[peak], hi),
            method='golden',
            tol=1e-6,
        )
        best, best_fidelity = float(res.x), float(-res.fun)
    else:
        best, best_fidelity = float(grid[peak]), float(values[peak])

    logger.info(
        f"{variant} calibration: Omega_0/2pi = {best / (2 * np.pi):.6e} Hz, "
        f"fidelity {best_fidelity:.8f} after {len(trace)} runs"
    )
    if best_fidelity < threshold:
        raise CalibrationError(
            f"{variant} gate reached fidelity {best_fidelity:.6f} < {threshold} at "
            f"Omega_0 = {best:.6e} rad/s; check the sequence and parameters"
        )
    return CalibrationResult(
        variant=variant,
        omega_0_rabi=best,
        fidelity=best_fidelity,
        scan=tuple(trace),
        evaluations=len(trace),
    )
