# dynamics/base.py
from __future__ import annotations

import logging
import math
from abc import ABC
from abc import abstractmethod
from collections.abc import Callable

import numpy as np
from scipy.integrate import DOP853
from scipy.integrate import RK45

from dynamics.jumps import JumpOperatorSet
from models.config import IntegratorConfig
from models.errors import PropagationError
from models.state import CompositeState

logger = logging.getLogger(__name__)

Hamiltonian = Callable[[float], np.ndarray]
Invariant = Callable[[np.ndarray], float]

# scheme_order -> scipy explicit Runge-Kutta solver (both accept complex states)
SOLVERS = {8: DOP853, 5: RK45}


def _norm_squared(y: np.ndarray) -> float:
    return float(np.real(np.vdot(y, y)))


class BasePropagator(ABC):
    """Advances a CompositeState from t0 to t1 under a time-dependent H/hbar."""

    kind: str = ''

    def __init__(self, cfg: IntegratorConfig | None = None):
        self.cfg = cfg or IntegratorConfig()

    @abstractmethod
    def propagate(
        self,
        h: Hamiltonian,
        state: CompositeState,
        t0: float,
        t1: float,
        jumps: JumpOperatorSet | None = None,
    ) -> CompositeState:
        pass

    def _integrate(
        self,
        rhs: Callable[[float, np.ndarray], np.ndarray],
        y0: np.ndarray,
        t0: float,
        t1: float,
        invariant: Invariant = _norm_squared,
    ) -> np.ndarray:
        """
        Steps the adaptive solver from t0 to t1.

        The change of `invariant` (norm or trace) across each accepted step is
        the local error reported when the step size underflows.
        """
        if t1 < t0:
            raise ValueError(f"cannot propagate backwards: t0={t0}, t1={t1}")
        if t1 == t0:
            return np.array(y0, dtype=complex)

        solver = SOLVERS[self.cfg.scheme_order](
            rhs,
            t0,
            np.asarray(y0, dtype=complex),
            t1,
            rtol=self.cfg.rel_tol,
            atol=self.cfg.abs_tol,
            max_step=self.cfg.max_step,
        )
        worst_local_error = 0.0
        smallest_step = math.inf
        previous = invariant(solver.y)
        while solver.status == 'running':
            message = solver.step()
            if solver.status == 'failed':
                raise PropagationError(
                    f"{self.kind} integrator failed: {message}; smallest accepted step "
                    f"{smallest_step:.3e} s, worst local error {worst_local_error:.3e}",
                    t=float(solver.t),
                    worst_local_error=worst_local_error,
                )
            current = invariant(solver.y)
            worst_local_error = max(worst_local_error, abs(current - previous))
            smallest_step = min(smallest_step, solver.step_size)
            previous = current
        logger.debug(
            f"{self.kind} [{t0:.3e}, {t1:.3e}] s: {solver.nfev} RHS evaluations, "
            f"worst local error {worst_local_error:.2e}"
        )
        return np.array(solver.y, dtype=complex)
