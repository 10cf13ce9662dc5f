# tests/test_states.py
from __future__ import annotations

import logging

import numpy as np
import pytest

from core.geometry import lamb_dicke
from core.states import bell_state
from core.states import fock_state
from core.states import initial_state
from core.states import leakage
from core.states import motional_entropy
from core.states import spin_ket
from core.states import thermal_state
from models.params import FockCutoff
from models.params import GateParams
from models.params import ModeGeometry
from models.state import CompositeState


def test_spin_ket_indexing():
    assert np.argmax(np.abs(spin_ket('dd'))) == 3
    assert np.argmax(np.abs(spin_ket('uu'))) == 0
    assert np.argmax(np.abs(spin_ket('du'))) == 2
    with pytest.raises(ValueError):
        spin_ket('dx')


def test_bell_state_is_normalised():
    for phase in (0.0, 0.7, np.pi):
        assert np.linalg.norm(bell_state(phase)) == pytest.approx(1.0)


def test_thermal_state_populations_and_mean():
    n_bar = 0.5
    motion = thermal_state(n_bar, FockCutoff(n_max=30))
    n = np.arange(31)
    expected = n_bar ** n / (1 + n_bar) ** (n + 1)
    assert np.allclose(motion.populations, expected / expected.sum())
    assert motion.mean_occupation == pytest.approx(n_bar, abs=1e-9)
    assert not motion.is_pure


def test_thermal_state_zero_is_ground_state():
    motion = thermal_state(0.0, FockCutoff(n_max=4))
    assert motion.is_pure
    assert motion.populations[0] == pytest.approx(1.0)


def test_thermal_state_rejects_negative_occupation():
    with pytest.raises(ValueError):
        thermal_state(-0.1, FockCutoff(n_max=4))


def test_thermal_state_reports_truncation(caplog):
    with caplog.at_level(logging.WARNING):
        motion = thermal_state(5.0, FockCutoff(n_max=5))
    assert motion.truncated_weight > 1e-6
    assert 'loses weight' in caplog.text


def test_initial_state_ground_is_pure():
    state = initial_state('dd', cutoff=FockCutoff(n_max=3))
    assert state.is_pure
    assert state.dim == 16
    assert state.spin_density()[3, 3] == pytest.approx(1.0)


def test_initial_state_thermal_is_mixed():
    cutoff = FockCutoff(n_max=6)
    state = initial_state('dd', motion=thermal_state(0.2, cutoff))
    assert not state.is_pure
    assert state.norm_or_trace() == pytest.approx(1.0)
    assert np.real(np.trace(state.motion_density())) == pytest.approx(1.0)


def test_motional_entropy():
    cutoff = FockCutoff(n_max=20)
    assert motional_entropy(initial_state('dd', cutoff=cutoff)) == pytest.approx(0.0, abs=1e-12)
    motion = thermal_state(0.3, cutoff)
    p = motion.populations
    expected = -np.sum(p[p > 0] * np.log(p[p > 0]))
    state = initial_state('uu', motion=motion)
    assert motional_entropy(state) == pytest.approx(expected, rel=1e-9)


def test_leakage_counts_the_top_two_levels():
    cutoff = FockCutoff(n_max=3)
    assert leakage(initial_state('dd', cutoff=cutoff)) == pytest.approx(0.0)
    assert leakage(initial_state('dd', motion=fock_state(2, cutoff))) == pytest.approx(1.0)


def test_composite_state_rejects_unnormalised_ket():
    with pytest.raises(ValueError):
        CompositeState(representation='pure', amplitudes=np.ones(8), cutoff=FockCutoff(n_max=1))


def test_composite_state_amplitudes_are_read_only():
    state = initial_state('dd', cutoff=FockCutoff(n_max=2))
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1.0


def test_lamb_dicke_of_the_quoted_modes():
    assert lamb_dicke(ModeGeometry.stretch()) == pytest.approx(0.3169, rel=1e-3)
    com = ModeGeometry.com()
    assert lamb_dicke(com) * com.xi[0] == pytest.approx(0.2948, rel=1e-3)


def test_mode_geometry_validation():
    with pytest.raises(ValueError):
        ModeGeometry(mode_label='stretch', omega_nu=1e7, xi=(0.6, 0.8))
    with pytest.raises(ValueError):
        ModeGeometry(mode_label='COM', omega_nu=1e7, xi=(0.6, -0.8))


def test_gate_params_derived_quantities():
    params = GateParams.preset('laser')
    assert params.carrier_pi_time == pytest.approx(5e-6)
    assert 2 * np.pi / params.delta == pytest.approx(105e-6)
    w1, w2 = params.omega_j
    assert w1 == pytest.approx(-w2)
    assert abs(w1) == pytest.approx(params.delta / 2)
    mw = GateParams.preset('microwave')
    assert abs(mw.omega_j[0]) == pytest.approx(mw.delta / (2 * np.sqrt(2)))


def test_gate_params_rejects_non_positive_detuning():
    with pytest.raises(ValueError):
        GateParams.preset('laser').replace(delta=0.0)
