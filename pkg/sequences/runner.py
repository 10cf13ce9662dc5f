# sequences/runner.py
from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import expm

from core.operators import embed_spin_pair
from core.operators import sigma_phi
from core.states import leakage
from dynamics.factory import select_propagator
from dynamics.jumps import JumpOperatorSet
from dynamics.jumps import heating_jumps
from dynamics.jumps import spontaneous_emission_jumps
from hamiltonians import HamiltonianModel
from hamiltonians import build_hamiltonian
from measurement.populations import populations_from_spin
from models.config import IntegratorConfig
from models.drive import PulseSequence
from models.errors import PropagationError
from models.noise import NoiseDraw
from models.noise import NoiseModel
from models.params import GateParams
from models.readout import PopulationProbs
from models.state import CompositeState
from sequences.compiler import analysis_pulse

logger = logging.getLogger(__name__)


def _jump_sets(params: GateParams, noise: NoiseModel | None) -> tuple[JumpOperatorSet, JumpOperatorSet]:
    """(always-on heating, scattering active only while the Raman beams are on)."""
    if noise is None:
        return JumpOperatorSet(), JumpOperatorSet()
    return (
        heating_jumps(noise.heating_rate, params.cutoff),
        spontaneous_emission_jumps(noise.se_rate_per_ion, noise.se_raman_fraction, params.cutoff),
    )


def run_experiment(
    seq: PulseSequence,
    initial: CompositeState,
    params: GateParams,
    noise: NoiseModel | None = None,
    cfg: IntegratorConfig | None = None,
    *,
    model: HamiltonianModel = 'full',
    draw: NoiseDraw | None = None,
    t0: float = 0.0,
) -> CompositeState:
    """
    Plays a pulse sequence segment by segment on one absolute clock.

    Closed pure-state runs use the unitary propagator; dissipative channels or
    a mixed initial state switch to the Lindblad propagator. A noise draw
    rescales the drives, and segments are split where its fast carrier
    multiplier changes.

    Raises:
        PropagationError: labelled with the index of the failing segment.
    """
    if initial.cutoff != params.cutoff:
        raise ValueError(f"state cutoff n_max={initial.cutoff.n_max} differs from params n_max={params.cutoff.n_max}")
    if not seq.segments:
        return initial

    heating, scattering = _jump_sets(params, noise)
    dissipative = not (heating.is_empty and scattering.is_empty)
    propagator = select_propagator(initial.is_pure, dissipative, cfg)
    draw = draw or NoiseDraw.nominal()

    state = initial
    t = t0
    for index, seg in enumerate(seq.segments):
        start, end = t, t + seg.duration
        edges = [start, *draw.breakpoints(start, end), end]
        jumps = heating + scattering if seg.drive.raman_active else heating
        try:
            for a, b in zip(edges[:-1], edges[1:]):
                if b <= a:
                    continue
                drive = seg.drive.scaled(
                    carrier=draw.carrier_multiplier(0.5 * (a + b)),
                    sideband=draw.sideband_multiplier,
                )
                h = build_hamiltonian(params, drive, model)
                state = propagator.propagate(h, state, a, b, jumps)
        except PropagationError as e:
            raise e.at_segment(index) from e
        if seg.frame_shift:
            state = shift_frame(state, seg.frame_shift)
        t = end

    leaked = leakage(state)
    diagnostics = {**state.diagnostics, 'leakage': leaked}
    if leaked > params.cutoff.leakage_tolerance:
        logger.warning(
            f"{leaked:.2e} of the population reached the top two Fock levels (n_max={params.cutoff.n_max}); "
            "raise the cutoff"
        )
    return CompositeState.from_propagation(state.representation, state.amplitudes, state.cutoff, diagnostics)


def frame_unitary(shift: float) -> np.ndarray:
    """exp(i shift/4 sigma_z) on each ion: |uu> gains `shift` relative to |dd>."""
    single = np.diag([np.exp(0.25j * shift), np.exp(-0.25j * shift)])
    return np.kron(single, single)


def shift_frame(state: CompositeState, shift: float) -> CompositeState:
    """Virtual z rotation of both qubit frames; the motion is untouched."""
    u = embed_spin_pair(frame_unitary(shift), state.cutoff)
    if state.is_pure:
        out = u @ state.amplitudes
    else:
        out = u @ state.amplitudes @ u.conj().T
    return CompositeState.from_propagation(state.representation, out, state.cutoff, state.diagnostics)


def analysis_unitary(phi: float) -> np.ndarray:
    """Two-ion carrier pi/2 rotation exp(-i pi/4 sigma_phi) on each ion."""
    single = expm(-0.25j * np.pi * sigma_phi(phi))
    return np.kron(single, single)


def analyzed_populations(
    state: CompositeState,
    phi: float,
    params: GateParams,
    noise: NoiseModel | None = None,
    cfg: IntegratorConfig | None = None,
    *,
    noisy_analysis: bool = False,
    t0: float = 0.0,
) -> PopulationProbs:
    """
    Readout populations after the analysis pulse at phase phi.

    The ideal pulse acts on the spins only, so it is applied to the reduced
    spin state. With noisy_analysis it is integrated on the full state
    under `noise` instead.
    """
    if noisy_analysis:
        final = run_experiment(analysis_pulse(phi, params), state, params, noise, cfg, t0=t0)
        return populations_from_spin(final.spin_density())
    u = analysis_unitary(phi)
    return populations_from_spin(u @ state.spin_density() @ u.conj().T)
