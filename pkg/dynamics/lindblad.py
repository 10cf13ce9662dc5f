# dynamics/lindblad.py
from __future__ import annotations

import logging

import numpy as np

from dynamics.base import BasePropagator
from dynamics.base import Hamiltonian
from dynamics.jumps import JumpOperatorSet
from models.errors import PositivityError
from models.state import CompositeState

logger = logging.getLogger(__name__)

TRACE_DRIFT_WARN = 1e-9
HERMITICITY_WARN = 1e-10
EIGEN_FLOOR = -1e-6


class LindbladPropagator(BasePropagator):
    """
    d(rho)/dt = -i[H, rho] + sum_k g_k (L_k rho L_k^+ - {L_k^+ L_k, rho} / 2).

    The right-hand side is symmetrised on every evaluation. Trace and
    Hermiticity drift of the result are reported in the diagnostics.
    """

    kind = 'lindblad'

    def propagate(
        self,
        h: Hamiltonian,
        state: CompositeState,
        t0: float,
        t1: float,
        jumps: JumpOperatorSet | None = None,
    ) -> CompositeState:
        dim = state.dim
        channels = jumps.active if jumps is not None else ()
        if channels:
            ops = np.array([ch.operator for ch in channels])
            ops_dag = ops.conj().transpose(0, 2, 1)
            rates = np.array([ch.rate for ch in channels]).reshape(-1, 1, 1)
            # sum_k g_k L_k^+ L_k
            decay = np.sum(rates * (ops_dag @ ops), axis=0)
        else:
            ops = ops_dag = rates = decay = None

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            rho = y.reshape(dim, dim)
            hr = h(t) @ rho
            drho = -1j * (hr - hr.conj().T)
            if ops is not None:
                drho = drho + np.sum(rates * (ops @ rho @ ops_dag), axis=0)
                dr = decay @ rho
                drho = drho - 0.5 * (dr + dr.conj().T)
            return (0.5 * (drho + drho.conj().T)).ravel()

        def trace(y: np.ndarray) -> float:
            return float(np.real(np.trace(y.reshape(dim, dim))))

        rho = self._integrate(rhs, state.density().ravel(), t0, t1, invariant=trace).reshape(dim, dim)

        herm_drift = float(np.max(np.abs(rho - rho.conj().T)))
        rho = 0.5 * (rho + rho.conj().T)
        trace_drift = abs(float(np.real(np.trace(rho))) - 1.0)
        min_eig = float(np.min(np.linalg.eigvalsh(rho)))

        if trace_drift > TRACE_DRIFT_WARN:
            logger.warning(f"trace drift {trace_drift:.2e} over [{t0:.3e}, {t1:.3e}] s")
        if herm_drift > HERMITICITY_WARN:
            logger.warning(f"Hermiticity drift {herm_drift:.2e} over [{t0:.3e}, {t1:.3e}] s")
        if min_eig < EIGEN_FLOOR:
            raise PositivityError(
                f"density operator eigenvalue {min_eig:.2e} below {EIGEN_FLOOR:g}; "
                "tighten tolerances or raise the Fock cutoff",
                t=t1,
            )

        diagnostics = dict(state.diagnostics)
        diagnostics['trace_drift'] = max(trace_drift, diagnostics.get('trace_drift', 0.0))
        diagnostics['hermiticity_drift'] = max(herm_drift, diagnostics.get('hermiticity_drift', 0.0))
        diagnostics['min_eigenvalue'] = min(min_eig, diagnostics.get('min_eigenvalue', min_eig))
        return CompositeState.from_propagation('density', rho, state.cutoff, diagnostics)
