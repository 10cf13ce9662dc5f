# dynamics/factory.py
from __future__ import annotations

from dynamics.base import BasePropagator
from dynamics.lindblad import LindbladPropagator
from dynamics.unitary import UnitaryPropagator
from models.config import IntegratorConfig


propagators = {
    'unitary': UnitaryPropagator,
    'lindblad': LindbladPropagator,
}


def get_propagator(kind: str, cfg: IntegratorConfig | None = None) -> BasePropagator:
    """
    Returns an initialised propagator backend by name.

    Raises:
        ValueError: unknown backend name.
    """
    result = propagators.get(kind, None)

    if not result:
        raise ValueError(f"Unsupported propagator: {kind}")

    return result(cfg)


def select_propagator(pure: bool, dissipative: bool, cfg: IntegratorConfig | None = None) -> BasePropagator:
    """Unitary for closed pure-state runs, Lindblad for everything else."""
    return get_propagator('unitary' if pure and not dissipative else 'lindblad', cfg)
