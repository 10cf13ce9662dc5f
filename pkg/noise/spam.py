# noise/spam.py
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from measurement.fidelity import bell_fidelity
from measurement.parity import fit_parity
from measurement.parity import phase_grid
from measurement.populations import parity
from measurement.populations import populations_from_spin
from models.readout import FidelityEstimate
from models.readout import PopulationProbs
from models.state import CompositeState
from sequences.runner import analysis_unitary


def spam_transition_matrix(eps: float) -> np.ndarray:
    """
    M[c_out, c_in] for independent per-ion bright/dark flips with probability eps/2.

    Columns are the true classes (0, 1, 2 bright ions).
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"SPAM error must lie in [0, 1], got {eps}")
    q = 0.5 * eps
    keep, flip = 1.0 - q, q
    return np.array([
        [keep * keep, flip * keep, flip * flip],
        [2 * flip * keep, keep * keep + flip * flip, 2 * flip * keep],
        [flip * flip, flip * keep, keep * keep],
    ])


def apply_spam(p: PopulationProbs, eps: float) -> PopulationProbs:
    if eps == 0:
        return p
    out = spam_transition_matrix(eps) @ np.array(p.as_tuple())
    return PopulationProbs.from_values(*out)


def compose_spam(eps_1: float, eps_2: float) -> float:
    """Single SPAM error equivalent to applying eps_1 then eps_2."""
    q1, q2 = 0.5 * eps_1, 0.5 * eps_2
    return 2.0 * (q1 + q2 - 2.0 * q1 * q2)


def pipeline_fidelity(
    state: CompositeState | np.ndarray,
    eps: float = 0.0,
    phis: Sequence[float] | None = None,
) -> FidelityEstimate:
    """
    Bell fidelity as the experiment extracts it: (P0 + P2 + A)/2 from
    SPAM-degraded populations and an exact parity scan.
    """
    spin = state.spin_density() if isinstance(state, CompositeState) else np.asarray(state, dtype=complex)
    phis = phase_grid() if phis is None else np.asarray(phis, dtype=float)

    base = apply_spam(populations_from_spin(spin), eps)
    parities = []
    for phi in phis:
        u = analysis_unitary(float(phi))
        parities.append(parity(apply_spam(populations_from_spin(u @ spin @ u.conj().T), eps)))
    fit = fit_parity(phis, parities)
    return bell_fidelity(base.P0, base.P2, fit.A, sigma_a=fit.stderr_A)
