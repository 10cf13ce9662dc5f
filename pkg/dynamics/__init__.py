from dynamics.ensemble import monte_carlo_ensemble
from dynamics.factory import get_propagator
from dynamics.jumps import JumpOperatorSet
from dynamics.jumps import heating_jumps
from dynamics.jumps import spontaneous_emission_jumps
from dynamics.lindblad import LindbladPropagator
from dynamics.unitary import UnitaryPropagator


def propagate_unitary(h, psi0, t0, t1, cfg=None):
    return UnitaryPropagator(cfg).propagate(h, psi0, t0, t1)


def propagate_lindblad(h, jumps, rho0, t0, t1, cfg=None):
    return LindbladPropagator(cfg).propagate(h, rho0, t0, t1, jumps)


__all__ = [
    'JumpOperatorSet',
    'LindbladPropagator',
    'UnitaryPropagator',
    'get_propagator',
    'heating_jumps',
    'monte_carlo_ensemble',
    'propagate_lindblad',
    'propagate_unitary',
    'spontaneous_emission_jumps',
]
