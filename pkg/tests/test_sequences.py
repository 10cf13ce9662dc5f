# tests/test_sequences.py
from __future__ import annotations

import math

import numpy as np
import pytest

from core.states import bell_state
from core.states import initial_state
from core.states import motional_entropy
from measurement.fidelity import bell_phase
from measurement.fidelity import bell_target_fidelity
from measurement.fidelity import fidelity_bell
from measurement.fidelity import fidelity_exact
from measurement.parity import fit_parity
from measurement.parity import phase_grid
from measurement.populations import parity
from measurement.populations import populations_from_spin
from models.errors import CalibrationError
from models.errors import PropagationError
from models.noise import NoiseDraw
from models.params import FockCutoff
from noise.probes import SPIN_ONLY_CUTOFF
from sequences.calibration import calibrate_sideband_amplitude
from sequences.compiler import analysis_pulse
from sequences.compiler import carrier_only
from sequences.compiler import closed_loop_phase
from sequences.compiler import gate_sequence
from sequences.compiler import gate_duration
from sequences.compiler import laser_gate_sequence
from sequences.compiler import microwave_gate_sequence
from sequences.compiler import scan_sequence
from sequences.compiler import sequence_from_document
from sequences.compiler import sequence_to_document
from sequences.compiler import without_carrier_segments
from sequences.runner import analysis_unitary
from sequences.runner import frame_unitary
from sequences.runner import run_experiment
from sequences.runner import shift_frame

SLOW_OFFSET = 1.03


def test_microwave_sequence_layout(microwave_params):
    seq = microwave_gate_sequence(microwave_params)
    assert len(seq.segments) == 3
    assert seq.sideband_time == pytest.approx(4 * math.pi / microwave_params.delta)
    assert seq.total_duration == pytest.approx(seq.sideband_time + microwave_params.carrier_pi_time)
    echo = seq.segments[1].drive
    assert not echo.sideband_on
    assert echo.carrier_phase == pytest.approx(math.pi / 2)
    assert gate_duration('microwave', microwave_params) == pytest.approx(250e-6)


def test_laser_sequence_layout(laser_params):
    seq = laser_gate_sequence(laser_params)
    phases = [seg.drive.carrier_phase for seg in seq.segments]
    assert phases == [0.0, math.pi]
    assert all(seg.drive.raman_carrier and seg.drive.raman_active for seg in seq.segments)
    assert seq.total_duration == pytest.approx(105e-6)


def test_sequence_document_golden(laser_params):
    doc = sequence_to_document(laser_gate_sequence(laser_params))
    assert doc['label'] == 'laser_gate'
    assert [s['duration_us'] for s in doc['segments']] == pytest.approx([52.5, 52.5])
    assert [s['carrier_phase_pi'] for s in doc['segments']] == pytest.approx([0.0, 1.0])
    rebuilt = sequence_from_document(doc)
    assert rebuilt.total_duration == pytest.approx(105e-6)
    assert rebuilt.segments[1].drive.carrier_phase == pytest.approx(math.pi)
    assert doc['segments'][0]['frame_shift_pi'] == 0.0
    assert doc['segments'][1]['frame_shift_pi'] == pytest.approx(-0.5)
    assert rebuilt.segments[1].frame_shift == pytest.approx(-math.pi / 2)


def test_scan_sequence_without_sideband_time_has_no_echo(microwave_params):
    assert scan_sequence('microwave', microwave_params, 0.0).total_duration == 0.0
    assert len(scan_sequence('microwave', microwave_params, 10e-6).segments) == 3
    with pytest.raises(ValueError):
        scan_sequence('laser', microwave_params, -1e-6)


def test_carrier_only_and_echo_removal(microwave_params):
    seq = microwave_gate_sequence(microwave_params)
    assert not any(seg.drive.sideband_on for seg in carrier_only(seq).segments)
    assert carrier_only(seq).total_duration == pytest.approx(seq.total_duration)
    assert len(without_carrier_segments(seq).segments) == 2


def test_analysis_pulse_is_a_half_flip(laser_params):
    pulse = analysis_pulse(0.3, laser_params)
    assert pulse.total_duration == pytest.approx(laser_params.carrier_pi_time / 2)
    params = laser_params.model_copy(update={'cutoff': SPIN_ONLY_CUTOFF})
    final = run_experiment(pulse, initial_state('dd', cutoff=SPIN_ONLY_CUTOFF), params)
    u = analysis_unitary(0.3)
    expected = u @ np.array([0, 0, 0, 1], dtype=complex)
    assert fidelity_exact(final, expected) == pytest.approx(1.0, abs=1e-8)


def test_run_experiment_checks_the_cutoff(laser_params):
    start = initial_state('dd', cutoff=FockCutoff(n_max=3))
    with pytest.raises(ValueError):
        run_experiment(laser_gate_sequence(laser_params), start, laser_params)


def test_propagation_error_is_relabelled_by_segment():
    err = PropagationError('step size underflow', t=1e-5).at_segment(2)
    assert err.segment == 2
    assert 'segment 2' in str(err)


def test_bell_state_parity_fringe_has_full_contrast():
    rho = np.outer(bell_state(0.4), bell_state(0.4).conj())
    phis = phase_grid(24)
    values = []
    for phi in phis:
        u = analysis_unitary(float(phi))
        values.append(parity(populations_from_spin(u @ rho @ u.conj().T)))
    fit = fit_parity(phis, values)
    assert fit.A == pytest.approx(1.0, abs=1e-9)
    assert fit.B == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize('variant, target', [('laser', 3), ('microwave', 0)])
def test_noise_free_carrier_only_sequence_refocuses(laser_params, microwave_params, variant, target):
    params = laser_params if variant == 'laser' else microwave_params
    spin_only = params.model_copy(update={'cutoff': SPIN_ONLY_CUTOFF})
    seq = carrier_only(laser_gate_sequence(spin_only) if variant == 'laser' else microwave_gate_sequence(spin_only))
    final = run_experiment(seq, initial_state('dd', cutoff=SPIN_ONLY_CUTOFF), spin_only)
    assert np.real(final.spin_density()[target, target]) >= 1 - 1e-6


def _sequence_error(seq, params) -> float:
    start = initial_state('dd', cutoff=SPIN_ONLY_CUTOFF)
    clean = run_experiment(seq, start, params).spin_density()
    shifted = run_experiment(seq, start, params, draw=NoiseDraw(carrier_slow=SLOW_OFFSET)).spin_density()
    return 1.0 - float(np.real(np.trace(clean @ shifted)))


def test_echo_suppresses_slow_carrier_offsets(microwave_params):
    params = microwave_params.model_copy(update={'cutoff': SPIN_ONLY_CUTOFF})
    gate = microwave_gate_sequence(params)
    with_echo = _sequence_error(carrier_only(gate), params)
    without_echo = _sequence_error(carrier_only(without_carrier_segments(gate)), params)
    assert with_echo * 10 <= without_echo


@pytest.mark.slow
@pytest.mark.parametrize('variant', ['laser', 'microwave'])
def test_calibration_reaches_the_threshold(laser_params, microwave_params, variant):
    params = laser_params if variant == 'laser' else microwave_params
    result = calibrate_sideband_amplitude(params.delta, variant, params, grid_points=20)
    assert result.fidelity >= 0.9999
    assert result.omega_0_rabi == pytest.approx(params.omega_0_rabi, rel=0.05)
    assert result.evaluations == len(result.scan)


@pytest.mark.slow
def test_variants_calibrate_to_different_amplitudes(laser_params, microwave_params):
    laser = calibrate_sideband_amplitude(laser_params.delta, 'laser', laser_params, grid_points=20)
    microwave = calibrate_sideband_amplitude(laser_params.delta, 'microwave', microwave_params, grid_points=20)
    # two loops need 1/sqrt(2) of the single-loop force at the same detuning
    assert microwave.omega_0_rabi == pytest.approx(laser.omega_0_rabi / math.sqrt(2), rel=0.02)


@pytest.mark.slow
def test_calibration_fails_below_an_unreachable_threshold(laser_params):
    with pytest.raises(CalibrationError):
        calibrate_sideband_amplitude(laser_params.delta, 'laser', laser_params, grid_points=10, threshold=1.0 + 1e-9)


def test_closed_loop_phase_of_the_stretch_mode(laser_params, microwave_params):
    assert closed_loop_phase('laser', laser_params) == pytest.approx(math.pi / 2)
    assert closed_loop_phase('microwave', microwave_params) == pytest.approx(-math.pi / 2)
    shifted = laser_params.model_copy(update={'phi': 0.1})
    assert closed_loop_phase('laser', shifted) == pytest.approx(math.pi / 2 + 0.2)


def test_gates_end_with_the_frame_update(laser_params, microwave_params):
    laser = laser_gate_sequence(laser_params)
    microwave = microwave_gate_sequence(microwave_params)
    assert [seg.frame_shift for seg in laser.segments] == pytest.approx([0.0, -math.pi / 2])
    assert [seg.frame_shift for seg in microwave.segments] == pytest.approx([0.0, 0.0, math.pi / 2])
    assert all(seg.frame_shift == 0.0 for seg in scan_sequence('laser', laser_params, 50e-6).segments)


def test_frame_update_moves_the_bell_phase(laser_params):
    rotated = frame_unitary(0.5) @ bell_state(0.3)
    assert fidelity_exact(np.outer(rotated, rotated.conj()), bell_state(0.8)) == pytest.approx(1.0, abs=1e-12)

    state = initial_state(bell_state(0.3), cutoff=laser_params.cutoff)
    shifted = shift_frame(state, -0.3)
    assert bell_phase(shifted) == pytest.approx(0.0, abs=1e-12)
    assert bell_target_fidelity(shifted) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.diag(shifted.spin_density()), np.diag(state.spin_density()))


@pytest.mark.slow
def test_ideal_laser_gate_prepares_the_bell_state(laser_params):
    params = laser_params.with_cutoff(15)
    params = calibrate_sideband_amplitude(params.delta, 'laser', params, grid_points=20).apply(params)
    final = run_experiment(laser_gate_sequence(params), initial_state('dd', cutoff=params.cutoff), params, model='rwa')
    assert fidelity_exact(final, bell_state(0.0)) >= 0.9999
    assert bell_target_fidelity(final) >= 0.9999
    assert fidelity_bell(final) >= 0.9999


@pytest.mark.slow
def test_ideal_microwave_gate_prepares_the_bell_state(microwave_params):
    params = calibrate_sideband_amplitude(
        microwave_params.delta, 'microwave', microwave_params, grid_points=20,
    ).apply(microwave_params)
    final = run_experiment(microwave_gate_sequence(params), initial_state('dd', cutoff=params.cutoff), params, model='rwa')
    assert fidelity_exact(final, bell_state(0.0)) >= 0.9999
    assert abs(bell_phase(final)) < 0.02


def _gate_overlap_error(seq, params) -> float:
    start = initial_state('dd', cutoff=params.cutoff)
    clean = run_experiment(seq, start, params)
    shifted = run_experiment(seq, start, params, draw=NoiseDraw(carrier_slow=SLOW_OFFSET))
    return 1.0 - abs(np.vdot(clean.amplitudes, shifted.amplitudes)) ** 2


@pytest.mark.slow
def test_echo_suppresses_slow_carrier_offsets_during_the_gate(microwave_params):
    params = calibrate_sideband_amplitude(
        microwave_params.delta, 'microwave', microwave_params, grid_points=20,
    ).apply(microwave_params)
    gate = microwave_gate_sequence(params)
    with_echo = _gate_overlap_error(gate, params)
    without_echo = _gate_overlap_error(without_carrier_segments(gate), params)
    assert with_echo * 10 <= without_echo


def _entropy_after_detuning_error(variant: str, params, error: float = 0.05) -> float:
    seq = gate_sequence(variant, params)
    detuned = params.model_copy(update={'delta': params.delta * (1 + error)})
    final = run_experiment(seq, initial_state('dd', cutoff=params.cutoff), detuned, model='rwa')
    return motional_entropy(final)


@pytest.mark.slow
def test_echoed_gate_leaves_less_spin_motion_entanglement_when_detuned(laser_params, microwave_params):
    assert _entropy_after_detuning_error('laser', laser_params, 0.0) < 1e-4
    microwave = _entropy_after_detuning_error('microwave', microwave_params)
    laser = _entropy_after_detuning_error('laser', laser_params)
    assert microwave < laser
