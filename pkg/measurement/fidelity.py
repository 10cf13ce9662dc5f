# measurement/fidelity.py
from __future__ import annotations

import math

import numpy as np

from core.states import bell_state
from measurement.populations import DD
from measurement.populations import UU
from models.readout import FidelityEstimate
from models.state import CompositeState


def _spin(rho: CompositeState | np.ndarray) -> np.ndarray:
    return rho.spin_density() if isinstance(rho, CompositeState) else np.asarray(rho, dtype=complex)


def fidelity_exact(rho: CompositeState | np.ndarray, target: np.ndarray) -> float:
    """<target|rho_spin|target> with the motion traced out."""
    target = np.asarray(target, dtype=complex)
    return float(np.real(np.vdot(target, _spin(rho) @ target)))


def bell_target_fidelity(rho: CompositeState | np.ndarray) -> float:
    """<Psi|rho|Psi> for the gate target Psi = (|dd> + |uu>)/sqrt(2)."""
    return fidelity_exact(rho, bell_state(0.0))


def fidelity_bell(rho: CompositeState | np.ndarray) -> float:
    """
    Overlap with (|dd> + e^{i b}|uu>)/sqrt(2), maximised over the phase b.

    Equal to (P_dd + P_uu)/2 + |rho_dd,uu|. Diagnostic only: it cannot see a
    wrong relative phase.
    """
    spin = _spin(rho)
    return float(0.5 * np.real(spin[DD, DD] + spin[UU, UU]) + abs(spin[DD, UU]))


def bell_phase(rho: CompositeState | np.ndarray) -> float:
    """Relative phase b of the best-matching Bell state."""
    spin = _spin(rho)
    return float(np.angle(spin[UU, DD]))


def bell_fidelity(
    p0: float,
    p2: float,
    a: float,
    *,
    sigma_p0: float = 0.0,
    sigma_p2: float = 0.0,
    sigma_a: float = 0.0,
    cov_p0_p2: float = 0.0,
) -> FidelityEstimate:
    """
    F = (P0 + P2 + A) / 2 with first-order Gaussian error propagation.

    Raises:
        ValueError: populations outside [0, 1] or negative uncertainties.
    """
    if not (0.0 <= p0 <= 1.0 and 0.0 <= p2 <= 1.0):
        raise ValueError(f"populations must lie in [0, 1], got P0={p0}, P2={p2}")
    if min(sigma_p0, sigma_p2, sigma_a) < 0:
        raise ValueError("standard errors must be non-negative")
    variance = sigma_p0 ** 2 + sigma_p2 ** 2 + sigma_a ** 2 + 2.0 * cov_p0_p2
    return FidelityEstimate(fidelity=0.5 * (p0 + p2 + a), stderr=0.5 * math.sqrt(max(variance, 0.0)))
