# measurement/parity.py
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from collections.abc import Sequence

import numpy as np
from pydantic import ValidationError
from scipy import linalg

from helper.workers import map_ordered
from measurement.populations import parity
from models.errors import FitError
from models.readout import ParityFit
from models.readout import ParityScan
from models.readout import PoissonMixtureFit
from models.readout import PopulationProbs

logger = logging.getLogger(__name__)

MIN_POINTS = 8
MAX_CONDITION = 1e6

PointResult = PopulationProbs | PoissonMixtureFit


def phase_grid(points: int = 24) -> np.ndarray:
    """Analysis phases evenly covering [0, 2 pi)."""
    return np.linspace(0.0, 2.0 * math.pi, points, endpoint=False)


def _check_coverage(phis: np.ndarray) -> None:
    if phis.size < MIN_POINTS:
        raise FitError(f"parity fit needs at least {MIN_POINTS} phases, got {phis.size}")
    angles = np.sort(np.mod(2.0 * phis, 2.0 * math.pi))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * math.pi]]))
    if gaps.max() > math.pi:
        raise FitError("analysis phases leave a gap wider than pi in 2*phi; the grid does not span a full period")


def fit_parity(
    phis: Sequence[float],
    parities: Sequence[float],
    stderr: Sequence[float] | None = None,
) -> ParityFit:
    """
    Linear least squares of A cos(2 phi + phi0) + B.

    Uses the basis (cos 2phi, sin 2phi, 1), so a = A cos(phi0) and
    b = -A sin(phi0). Weighted by 1/stderr^2 when per-point errors are given.

    Raises:
        FitError: too few points, incomplete phase coverage or an aliased grid.
    """
    phis = np.asarray(phis, dtype=float)
    y = np.asarray(parities, dtype=float)
    _check_coverage(phis)

    design = np.column_stack([np.cos(2.0 * phis), np.sin(2.0 * phis), np.ones_like(phis)])
    if stderr is not None:
        sigma = np.asarray(stderr, dtype=float)
        # boundary estimates (P1 near 0) report vanishing errors
        sigma = np.maximum(sigma, max(0.1 * float(np.median(sigma)), 1e-12))
        weights = 1.0 / sigma
    else:
        weights = np.ones_like(y)
    wx = design * weights[:, None]
    wy = y * weights

    condition = float(np.linalg.cond(wx))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise FitError(f"parity design matrix is ill-conditioned (cond={condition:.2e}); phase grid aliases")

    coef, *_ = linalg.lstsq(wx, wy)
    residuals = y - design @ coef
    normal = np.linalg.inv(wx.T @ wx)
    if stderr is not None:
        cov = normal
    else:
        dof = max(y.size - 3, 1)
        cov = normal * float(residuals @ residuals) / dof

    a, b, offset = coef
    amplitude = math.hypot(a, b)
    phi0 = math.atan2(-b, a)
    if amplitude > 0:
        jac_a = np.array([a / amplitude, b / amplitude, 0.0])
        jac_phi = np.array([b / amplitude ** 2, -a / amplitude ** 2, 0.0])
        se_a = math.sqrt(max(jac_a @ cov @ jac_a, 0.0))
        se_phi = math.sqrt(max(jac_phi @ cov @ jac_phi, 0.0))
    else:
        se_a, se_phi = math.sqrt(max(cov[0, 0], 0.0)), math.pi

    try:
        return ParityFit(
            A=amplitude,
            phi0=phi0,
            B=float(offset),
            stderr_A=se_a,
            stderr_phi0=se_phi,
            stderr_B=math.sqrt(max(cov[2, 2], 0.0)),
            residual_rms=float(np.sqrt(np.mean(residuals ** 2))),
            condition_number=condition,
            n_points=int(y.size),
        )
    except ValidationError as e:
        raise FitError(f"unphysical parity fit: {e.errors()[0]['msg']}") from e


def _point_values(result: PointResult) -> tuple[PopulationProbs, float, float | None]:
    if isinstance(result, PoissonMixtureFit):
        # parity = 1 - 2 P1
        return result.populations, parity(result.populations), 2.0 * result.stderr[1]
    return result, parity(result), None


def parity_scan(
    final_state: Callable[[float], PointResult],
    phis: Sequence[float] | None = None,
    workers: int | None = None,
) -> ParityScan:
    """
    Evaluates the readout after an analysis pulse at every phase and fits the oscillation.

    `final_state(phi)` returns either exact populations or a histogram fit;
    histogram fits contribute per-point standard errors and a weighted fit.
    """
    phis = phase_grid() if phis is None else np.asarray(phis, dtype=float)
    results = map_ordered(final_state, list(phis), workers)
    points = [_point_values(r) for r in results]
    populations = tuple(p for p, _, _ in points)
    values = tuple(v for _, v, _ in points)
    errors = [e for _, _, e in points]
    stderr = tuple(errors) if all(e is not None for e in errors) else None

    fit = fit_parity(phis, values, stderr)
    logger.info(f"parity scan: A={fit.A:.4f} phi0={fit.phi0:.4f} B={fit.B:.4f} over {len(phis)} phases")
    return ParityScan(
        phis=tuple(float(p) for p in phis),
        parity=values,
        stderr=stderr,
        populations=populations,
        fit=fit,
    )
