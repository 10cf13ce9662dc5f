# measurement/populations.py
from __future__ import annotations

import numpy as np

from models.readout import PopulationProbs
from models.state import CompositeState

# two-ion spin indices, 2*s1 + s2 with |up> = 0
UU, UD, DU, DD = 0, 1, 2, 3


def populations_from_spin(rho_spin: np.ndarray) -> PopulationProbs:
    """Readout classes from a 4x4 spin density matrix; |down> is the bright state."""
    diag = np.real(np.diag(rho_spin))
    return PopulationProbs.from_values(diag[UU], diag[UD] + diag[DU], diag[DD])


def populations_from_state(state: CompositeState) -> PopulationProbs:
    """
    P0 = <uu|rho|uu> (no ion bright), P2 = <dd|rho|dd> (both bright), P1 the rest.
    """
    return populations_from_spin(state.spin_density())


def parity(p: PopulationProbs) -> float:
    return p.P2 + p.P0 - p.P1
