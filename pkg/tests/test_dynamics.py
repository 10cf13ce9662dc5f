# tests/test_dynamics.py
from __future__ import annotations

import numpy as np
import pytest

from core.states import initial_state
from dynamics import propagate_lindblad
from dynamics import propagate_unitary
from dynamics.ensemble import average_states
from dynamics.ensemble import monte_carlo_ensemble
from dynamics.ensemble import shot_generators
from dynamics.factory import get_propagator
from dynamics.factory import select_propagator
from dynamics.jumps import heating_jumps
from dynamics.jumps import spontaneous_emission_jumps
from dynamics.lindblad import LindbladPropagator
from dynamics.unitary import UnitaryPropagator
from hamiltonians import build_hamiltonian
from measurement.fidelity import bell_target_fidelity
from models.config import IntegratorConfig
from models.drive import DriveSnapshot
from models.errors import PropagationError
from models.noise import NoiseModel
from models.params import FockCutoff
from models.state import CompositeState
from sequences.compiler import gate_sequence
from sequences.runner import run_experiment

STRICT = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)


def _zero_hamiltonian(dim: int):
    zero = np.zeros((dim, dim), dtype=complex)
    return lambda t: zero


def _breaks_down_at(dim: int, t_break: float):
    zero = np.zeros((dim, dim), dtype=complex)
    broken = np.full((dim, dim), np.nan, dtype=complex)
    return lambda t: zero if t <= t_break else broken


def test_factory_returns_backends():
    assert isinstance(get_propagator('unitary'), UnitaryPropagator)
    assert isinstance(get_propagator('lindblad'), LindbladPropagator)
    with pytest.raises(ValueError):
        get_propagator('stochastic')
    assert isinstance(select_propagator(pure=True, dissipative=False), UnitaryPropagator)
    assert isinstance(select_propagator(pure=True, dissipative=True), LindbladPropagator)
    assert isinstance(select_propagator(pure=False, dissipative=False), LindbladPropagator)


def test_unitary_rejects_mixed_states_and_jumps():
    cutoff = FockCutoff(n_max=2)
    pure = initial_state('dd', cutoff=cutoff)
    mixed = CompositeState(representation='density', amplitudes=pure.density(), cutoff=cutoff)
    h = _zero_hamiltonian(pure.dim)
    with pytest.raises(ValueError):
        UnitaryPropagator().propagate(h, mixed, 0.0, 1e-6)
    with pytest.raises(ValueError):
        UnitaryPropagator().propagate(h, pure, 0.0, 1e-6, heating_jumps(10.0, cutoff))


def test_lindblad_without_jumps_matches_unitary(laser_params):
    h = build_hamiltonian(laser_params, DriveSnapshot(), 'full')
    start = initial_state('dd', cutoff=laser_params.cutoff)
    psi = propagate_unitary(h, start, 0.0, 20e-6, STRICT)
    rho = propagate_lindblad(h, None, start, 0.0, 20e-6, STRICT)
    assert np.allclose(rho.amplitudes, psi.density(), atol=1e-8)


def test_heating_raises_occupation_linearly():
    cutoff = FockCutoff(n_max=10)
    start = initial_state('dd', cutoff=cutoff)
    rate, t = 1000.0, 100e-6
    final = propagate_lindblad(_zero_hamiltonian(start.dim), heating_jumps(rate, cutoff), start, 0.0, t, STRICT)
    n = np.arange(cutoff.dim)
    mean = float(np.real(np.diag(final.motion_density())) @ n)
    assert mean == pytest.approx(rate * t, rel=1e-6)
    assert final.diagnostics['trace_drift'] <= 1e-9
    assert final.diagnostics['min_eigenvalue'] >= -1e-6


def test_rayleigh_scattering_dephases_at_twice_the_rate():
    plus = np.array([1, 0, 1, 0], dtype=complex) / np.sqrt(2)   # ion 1 in (|u> + |d>)/sqrt2, ion 2 up
    spin_only = CompositeState(
        representation='density',
        amplitudes=np.kron(np.outer(plus, plus.conj()), np.diag([1.0, 0.0])),
        cutoff=FockCutoff(n_max=1),
    )
    rate, t = 2000.0, 200e-6
    jumps = spontaneous_emission_jumps(rate, 0.0, spin_only.cutoff)
    final = propagate_lindblad(_zero_hamiltonian(spin_only.dim), jumps, spin_only, 0.0, t, STRICT)
    coherence = abs(final.spin_density()[0, 2])
    assert coherence == pytest.approx(0.5 * np.exp(-2 * rate * t), rel=1e-6)


def test_jump_constructors_validate_inputs():
    cutoff = FockCutoff(n_max=2)
    assert heating_jumps(0.0, cutoff).is_empty
    with pytest.raises(ValueError):
        heating_jumps(-1.0, cutoff)
    with pytest.raises(ValueError):
        spontaneous_emission_jumps(1.0, 1.5, cutoff)
    se = spontaneous_emission_jumps(10.0, 0.5, cutoff)
    assert len(se.active) == 6
    assert len((se + heating_jumps(5.0, cutoff)).active) == 8


@pytest.mark.slow
def test_gate_runs_conserve_norm_and_trace(laser_params, microwave_params):
    for variant, params in (('laser', laser_params), ('microwave', microwave_params)):
        seq = gate_sequence(variant, params)
        start = initial_state('dd', cutoff=params.cutoff)
        pure = run_experiment(seq, start, params, cfg=STRICT)
        assert pure.diagnostics['norm_drift'] <= 1e-9

        noise = NoiseModel(heating_rate=100.0, se_rate_per_ion=50.0)
        mixed = run_experiment(seq, start, params, noise, STRICT)
        assert mixed.diagnostics['trace_drift'] <= 1e-9
        assert mixed.diagnostics['min_eigenvalue'] >= -1e-6


def test_shot_generators_are_reproducible():
    a = [g.standard_normal() for g in shot_generators(7, 5)]
    b = [g.standard_normal() for g in shot_generators(7, 5)]
    c = [g.standard_normal() for g in shot_generators(8, 5)]
    assert a == b
    assert a != c


def test_monte_carlo_mean_does_not_depend_on_worker_count():
    def experiment(x: float) -> float:
        return x * x

    def sampler(rng: np.random.Generator) -> float:
        return float(rng.standard_normal())

    serial = monte_carlo_ensemble(experiment, sampler, 40, seed=11, workers=1)
    pooled = monte_carlo_ensemble(experiment, sampler, 40, seed=11, workers=4)
    assert serial.outcomes == pooled.outcomes
    assert serial.mean == pooled.mean
    with pytest.raises(ValueError):
        monte_carlo_ensemble(experiment, sampler, 0, seed=11)


def test_average_states_mixes_equally():
    cutoff = FockCutoff(n_max=1)
    up = initial_state('uu', cutoff=cutoff)
    down = initial_state('dd', cutoff=cutoff)
    mixed = average_states([up, down])
    spin = mixed.spin_density()
    assert spin[0, 0] == pytest.approx(0.5)
    assert spin[3, 3] == pytest.approx(0.5)
    assert abs(spin[0, 3]) == pytest.approx(0.0)


def test_step_underflow_reports_the_worst_local_error():
    cutoff = FockCutoff(n_max=2)
    start = initial_state('dd', cutoff=cutoff)
    h = _breaks_down_at(start.dim, 50e-6)
    with np.errstate(invalid='ignore', over='ignore'), pytest.raises(PropagationError) as info:
        UnitaryPropagator().propagate(h, start, 0.0, 100e-6)
    err = info.value
    assert err.worst_local_error is not None
    assert 'worst local error' in str(err)
    assert err.t == pytest.approx(50e-6, rel=1e-3)
    assert err.at_segment(1).worst_local_error == err.worst_local_error


@pytest.mark.slow
@pytest.mark.parametrize('noise', [None, NoiseModel(heating_rate=100.0, se_rate_per_ion=50.0)])
def test_halving_tolerances_leaves_the_gate_unchanged(laser_params, noise):
    cfg = IntegratorConfig()
    seq = gate_sequence('laser', laser_params)
    start = initial_state('dd', cutoff=laser_params.cutoff)
    default = run_experiment(seq, start, laser_params, noise, cfg, model='rwa')
    halved = run_experiment(seq, start, laser_params, noise, cfg.tightened(), model='rwa')
    limit = 1e-8 if noise is None else 1e-7
    assert abs(bell_target_fidelity(default) - bell_target_fidelity(halved)) < limit
