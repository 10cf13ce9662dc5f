# sequences/compiler.py
"""
Pulse programs of the two gate variants.

microwave: [carrier + sideband, 2pi/delta] -> [carrier at +pi/2, pi/(2 Omega_C)] -> [carrier + sideband, 2pi/delta]
laser:     [carrier + sideband, pi/delta]  -> [carrier at +pi, sideband, pi/delta]

Phases are relative to the running carrier frame; absolute time is threaded
through every segment by the runner. Both gates end with a virtual frame
update on their last segment that takes the closed-loop state to
(|dd> + |uu>)/sqrt(2).
"""
from __future__ import annotations

import math
from typing import Any

from models.drive import DriveSnapshot
from models.drive import PulseSegment
from models.drive import PulseSequence
from models.params import GateParams
from models.params import Variant

MICROWAVE_ECHO_PHASE = 0.5 * math.pi
LASER_FLIP_PHASE = math.pi


def _gate_drive(carrier_phase: float = 0.0, raman_carrier: bool = False) -> DriveSnapshot:
    return DriveSnapshot(carrier_on=True, carrier_phase=carrier_phase, sideband_on=True, raman_carrier=raman_carrier)


def _carrier_drive(carrier_phase: float = 0.0, raman_carrier: bool = False) -> DriveSnapshot:
    return DriveSnapshot(carrier_on=True, carrier_phase=carrier_phase, sideband_on=False, raman_carrier=raman_carrier)


def _check_delta(params: GateParams) -> None:
    if params.delta <= 0:
        raise ValueError(f"gate detuning must be positive, got {params.delta}")


def _microwave(params: GateParams, sideband_time: float, frame_shift: float = 0.0) -> PulseSequence:
    half = 0.5 * sideband_time
    segments = [PulseSegment(duration=half, drive=_gate_drive())]
    if sideband_time > 0:
        segments.append(PulseSegment(duration=params.carrier_pi_time, drive=_carrier_drive(MICROWAVE_ECHO_PHASE)))
    segments.append(PulseSegment(duration=half, drive=_gate_drive(), frame_shift=frame_shift))
    return PulseSequence(segments=tuple(segments), label='microwave_gate')


def _laser(params: GateParams, gate_time: float, frame_shift: float = 0.0) -> PulseSequence:
    half = 0.5 * gate_time
    return PulseSequence(
        segments=(
            PulseSegment(duration=half, drive=_gate_drive(0.0, raman_carrier=True)),
            PulseSegment(
                duration=half,
                drive=_gate_drive(LASER_FLIP_PHASE, raman_carrier=True),
                frame_shift=frame_shift,
            ),
        ),
        label='laser_gate',
    )


def closed_loop_phase(variant: Variant, params: GateParams) -> float:
    """
    Relative phase of |uu> against |dd> after the noise-free closed loops,
    before the frame update.

    The force acts along sigma_phi on both ions, so the loops apply
    exp(-i Phi sigma_phi sigma_phi) with the sign of Phi set by
    xi_1 xi_2 cos(phi'_1 - phi'_2). The microwave echo swaps |dd> and |uu>,
    which reverses the phase.
    """
    xi_1, xi_2 = params.geometry.xi
    coupling = xi_1 * xi_2 * math.cos(params.phi_prime[0] - params.phi_prime[1])
    loop = -0.5 * math.pi if coupling >= 0 else 0.5 * math.pi
    if variant == 'microwave':
        loop = -loop
    return loop + 2.0 * params.phi


def microwave_gate_sequence(params: GateParams) -> PulseSequence:
    """Two closed loops of 2pi/delta around a phase-shifted carrier pi pulse; sideband time 4pi/delta."""
    _check_delta(params)
    return _microwave(params, 4.0 * math.pi / params.delta, -closed_loop_phase('microwave', params))


def laser_gate_sequence(params: GateParams) -> PulseSequence:
    """One loop of 2pi/delta with the carrier phase flipped by pi halfway through."""
    _check_delta(params)
    return _laser(params, 2.0 * math.pi / params.delta, -closed_loop_phase('laser', params))


def gate_sequence(variant: Variant, params: GateParams) -> PulseSequence:
    if variant == 'microwave':
        return microwave_gate_sequence(params)
    return laser_gate_sequence(params)


def gate_duration(variant: Variant, params: GateParams) -> float:
    """Sideband-on time of the full gate."""
    return (4.0 if variant == 'microwave' else 2.0) * math.pi / params.delta


def scan_sequence(variant: Variant, params: GateParams, duration: float) -> PulseSequence:
    """
    The gate truncated to `duration` of sideband-on time, with the mid-point
    operation (carrier phase flip or echo pulse) at half of that duration.
    """
    if duration < 0:
        raise ValueError(f"interrogation time must be non-negative, got {duration}")
    _check_delta(params)
    if variant == 'microwave':
        return _microwave(params, duration)
    return _laser(params, duration)


def analysis_pulse(phi: float, params: GateParams) -> PulseSequence:
    """Carrier pi/2 pulse at phase phi: duration pi/(4 Omega_C)."""
    return PulseSequence(
        segments=(PulseSegment(duration=0.5 * params.carrier_pi_time, drive=_carrier_drive(phi)),),
        label='analysis',
    )


def carrier_only(sequence: PulseSequence) -> PulseSequence:
    """Same timing and carrier phases with every sideband drive switched off."""
    segments = tuple(
        seg.model_copy(update={'drive': seg.drive.model_copy(update={'sideband_on': False})})
        for seg in sequence.segments
    )
    return PulseSequence(segments=segments, label='carrier_only')


def without_carrier_segments(sequence: PulseSequence) -> PulseSequence:
    """Drops the segments that drive only the carrier (the microwave echo pulse)."""
    kept = tuple(seg for seg in sequence.segments if seg.drive.sideband_on)
    return PulseSequence(segments=kept, label='custom')


def sequence_to_document(sequence: PulseSequence) -> dict[str, Any]:
    """Durations in microseconds, phases in units of pi."""
    return {
        'label': sequence.label,
        'segments': [
            {
                'duration_us': seg.duration * 1e6,
                'carrier_on': seg.drive.carrier_on,
                'carrier_phase_pi': seg.drive.carrier_phase / math.pi,
                'carrier_scale': seg.drive.carrier_scale,
                'sideband_on': seg.drive.sideband_on,
                'sideband_phase_offsets_pi': [p / math.pi for p in seg.drive.sideband_phase_offsets],
                'sideband_scale': seg.drive.sideband_scale,
                'raman_carrier': seg.drive.raman_carrier,
                'frame_shift_pi': seg.frame_shift / math.pi,
            }
            for seg in sequence.segments
        ],
    }


def sequence_from_document(document: dict[str, Any]) -> PulseSequence:
    segments = []
    for entry in document.get('segments', []):
        drive = DriveSnapshot(
            carrier_on=entry.get('carrier_on', True),
            carrier_phase=math.pi * entry.get('carrier_phase_pi', 0.0),
            carrier_scale=entry.get('carrier_scale', 1.0),
            sideband_on=entry.get('sideband_on', True),
            sideband_phase_offsets=tuple(math.pi * p for p in entry.get('sideband_phase_offsets_pi', (0.0, 0.0))),
            sideband_scale=entry.get('sideband_scale', 1.0),
            raman_carrier=entry.get('raman_carrier', False),
        )
        segments.append(PulseSegment(
            duration=entry['duration_us'] * 1e-6,
            drive=drive,
            frame_shift=math.pi * entry.get('frame_shift_pi', 0.0),
        ))
    return PulseSequence(segments=tuple(segments), label=document.get('label', 'custom'))
