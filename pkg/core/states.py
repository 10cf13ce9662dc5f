# core/states.py
from __future__ import annotations

import logging

import numpy as np
from scipy import stats

from core.constants import DOWN
from core.constants import UP
from models.params import FockCutoff
from models.state import CompositeState
from models.state import MotionalState

logger = logging.getLogger(__name__)

TRUNCATION_WARN = 1e-6

_LABELS = {'u': UP, 'd': DOWN}


def spin_ket(label: str) -> np.ndarray:
    """Two-ion basis ket from a label such as 'dd' or 'ud' (ion 1 first)."""
    if len(label) != 2 or any(ch not in _LABELS for ch in label):
        raise ValueError(f"spin label must be two of 'u'/'d', got {label!r}")
    ket = np.zeros(4, dtype=complex)
    ket[2 * _LABELS[label[0]] + _LABELS[label[1]]] = 1.0
    return ket


def bell_state(phase: float = 0.0) -> np.ndarray:
    """(|down down> + e^{i phase} |up up>) / sqrt(2)."""
    return (spin_ket('dd') + np.exp(1j * phase) * spin_ket('uu')) / np.sqrt(2.0)


def fock_state(n: int, cutoff: FockCutoff) -> MotionalState:
    if not 0 <= n <= cutoff.n_max:
        raise ValueError(f"Fock level {n} outside 0..{cutoff.n_max}")
    rho = np.zeros((cutoff.dim, cutoff.dim), dtype=complex)
    rho[n, n] = 1.0
    return MotionalState(rho=rho, cutoff=cutoff, n_bar=float(n))


def thermal_state(n_bar: float, cutoff: FockCutoff) -> MotionalState:
    """
    Thermal occupation p_n = n_bar^n / (1 + n_bar)^(n+1), renormalised over 0..n_max.

    The weight lost to truncation is reported on the result and logged
    when it exceeds 1e-6.
    """
    if n_bar < 0:
        raise ValueError(f"mean occupation must be non-negative, got {n_bar}")
    if n_bar == 0:
        return fock_state(0, cutoff)

    # scipy's geometric distribution starts at 1, so shift by one
    ratio = n_bar / (1.0 + n_bar)
    levels = np.arange(cutoff.dim)
    probs = stats.geom.pmf(levels + 1, 1.0 - ratio)
    truncated = float(ratio ** cutoff.dim)
    if truncated > TRUNCATION_WARN:
        logger.warning(
            f"thermal state n_bar={n_bar} loses weight {truncated:.2e} above n_max={cutoff.n_max}; "
            "consider a larger cutoff"
        )
    probs = probs / probs.sum()
    return MotionalState(rho=np.diag(probs).astype(complex), cutoff=cutoff, n_bar=n_bar, truncated_weight=truncated)


def initial_state(
    spin: str | np.ndarray = 'dd',
    motion: MotionalState | None = None,
    cutoff: FockCutoff | None = None,
) -> CompositeState:
    """Product of a spin state and a motional state; ground state by default."""
    if motion is None:
        motion = fock_state(0, cutoff or FockCutoff())
    spin_vec = spin_ket(spin) if isinstance(spin, str) else spin
    return CompositeState.product(spin_vec, motion)


def motional_entropy(state: CompositeState) -> float:
    """Von Neumann entropy (nats) of the reduced motional state."""
    eigs = np.clip(np.linalg.eigvalsh(state.motion_density()), 0.0, None)
    if eigs.sum() == 0:
        return 0.0
    return float(stats.entropy(eigs))


def leakage(state: CompositeState) -> float:
    """Population in the two highest retained Fock levels."""
    populations = np.real(np.diag(state.motion_density()))
    return float(populations[-2:].sum())
