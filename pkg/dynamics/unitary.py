# dynamics/unitary.py
from __future__ import annotations

import logging

import numpy as np

from dynamics.base import BasePropagator
from dynamics.base import Hamiltonian
from dynamics.jumps import JumpOperatorSet
from models.state import CompositeState

logger = logging.getLogger(__name__)

NORM_DRIFT_WARN = 1e-9


class UnitaryPropagator(BasePropagator):
    """i d(psi)/dt = H(t) psi for pure states. Norm drift is reported, never removed."""

    kind = 'unitary'

    def propagate(
        self,
        h: Hamiltonian,
        state: CompositeState,
        t0: float,
        t1: float,
        jumps: JumpOperatorSet | None = None,
    ) -> CompositeState:
        if not state.is_pure:
            raise ValueError("unitary propagation needs a pure state; use the Lindblad propagator for mixtures")
        if jumps is not None and not jumps.is_empty:
            raise ValueError("unitary propagation cannot apply jump operators")

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            return -1j * (h(t) @ y)

        psi = self._integrate(rhs, state.amplitudes, t0, t1)
        drift = abs(float(np.linalg.norm(psi)) - 1.0)
        if drift > NORM_DRIFT_WARN:
            logger.warning(f"norm drift {drift:.2e} over [{t0:.3e}, {t1:.3e}] s; tighten tolerances")

        diagnostics = dict(state.diagnostics)
        diagnostics['norm_drift'] = max(drift, diagnostics.get('norm_drift', 0.0))
        return CompositeState.from_propagation('pure', psi, state.cutoff, diagnostics)
