# hamiltonians.py
"""
Time-dependent gate Hamiltonians.

Every builder returns H/hbar in rad/s as a dense matrix on
(ion 1) x (ion 2) x (motion), evaluated at an absolute time t.

  full         lab/interaction frame, carrier plus blue sideband
  rwa          same frame, sideband kept only along the carrier axis
  dressed      dressed frame, both the force term and the fast flip term
  dressed_rwa  dressed frame, force term only

The dressed-frame builders return matrices in (|+>, |->) coordinates.
"""
from __future__ import annotations

import math
from collections.abc import Callable
from functools import lru_cache
from typing import Literal
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from core.operators import SIGMA_X
from core.operators import SIGMA_Z
from core.operators import dressed_change_of_basis
from core.operators import embed
from core.operators import embed_spin_pair
from core.operators import ladder_operators
from core.operators import spin_operators
from models.drive import DriveSnapshot
from models.drive import PulseSequence
from models.errors import FrameError
from models.params import GateParams
from models.state import CompositeState

HamiltonianModel = Literal['full', 'rwa', 'dressed', 'dressed_rwa']

PHASE_TOL = 1e-12


class _Blocks(NamedTuple):
    carrier_up: tuple[np.ndarray, np.ndarray]        # sigma_plus_j
    carrier_down: tuple[np.ndarray, np.ndarray]      # sigma_minus_j
    blue: tuple[np.ndarray, np.ndarray]              # sigma_plus_j a_dag
    blue_flip: tuple[np.ndarray, np.ndarray]         # sigma_minus_j a_dag
    dressed_z: tuple[np.ndarray, np.ndarray]         # Z_j a_dag
    dressed_plus: tuple[np.ndarray, np.ndarray]      # |+><-|_j
    dressed_minus: tuple[np.ndarray, np.ndarray]     # |-><+|_j
    raising: np.ndarray
    lowering: np.ndarray


@lru_cache(maxsize=16)
def _blocks(n_max: int) -> _Blocks:
    ops = spin_operators(n_max)
    lowering_1, raising_1 = ladder_operators(n_max)
    lowering = embed(lowering_1, 'motion', n_max)
    raising = embed(raising_1, 'motion', n_max)
    p_flip = np.array([[0, 1], [0, 0]], dtype=complex)
    m_flip = p_flip.T.copy()

    def pair(single: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return embed(single, 'ion1', n_max), embed(single, 'ion2', n_max)

    blocks = _Blocks(
        carrier_up=ops.sigma_plus,
        carrier_down=ops.sigma_minus,
        blue=(ops.sigma_plus[0] @ raising, ops.sigma_plus[1] @ raising),
        blue_flip=(ops.sigma_minus[0] @ raising, ops.sigma_minus[1] @ raising),
        dressed_z=tuple(z @ raising for z in pair(SIGMA_Z)),
        dressed_plus=pair(p_flip),
        dressed_minus=pair(m_flip),
        raising=raising,
        lowering=lowering,
    )
    for group in blocks:
        for arr in (group if isinstance(group, tuple) else (group,)):
            arr.setflags(write=False)
    return blocks


def _carrier_phase(params: GateParams, drive: DriveSnapshot) -> float:
    return params.phi + drive.carrier_phase


def _sideband_phases(params: GateParams, drive: DriveSnapshot) -> tuple[float, float]:
    return (
        params.phi_prime[0] + drive.sideband_phase_offsets[0],
        params.phi_prime[1] + drive.sideband_phase_offsets[1],
    )


def _hermitian(x: np.ndarray) -> np.ndarray:
    return x + x.conj().T


def _carrier_part(params: GateParams, drive: DriveSnapshot, blocks: _Blocks) -> np.ndarray:
    amp = params.omega_C * drive.carrier_amplitude * np.exp(1j * _carrier_phase(params, drive))
    return amp * (blocks.carrier_up[0] + blocks.carrier_up[1])


def h_lab(params: GateParams, drive: DriveSnapshot, t: float) -> np.ndarray:
    """
    sum_j [Omega_C e^{i phi} s+_j + i Omega_j e^{i phi'_j} e^{-i delta t} s+_j a_dag] + h.c.
    """
    blocks = _blocks(params.cutoff.n_max)
    x = _carrier_part(params, drive, blocks)
    s = drive.sideband_amplitude
    if s:
        rotor = np.exp(-1j * params.delta * t)
        for j, (omega_j, phase_j) in enumerate(zip(params.omega_j, _sideband_phases(params, drive))):
            x = x + 1j * omega_j * s * np.exp(1j * phase_j) * rotor * blocks.blue[j]
    return _hermitian(x)


def h_lab_rwa(params: GateParams, drive: DriveSnapshot, t: float) -> np.ndarray:
    """
    Lab-frame Hamiltonian with each sideband reduced to its component along
    the carrier axis: (i Omega_j / 2) e^{i(phi'_j - phi)} sigma_phi,j a_dag e^{-i delta t} + h.c.

    Raises:
        FrameError: the sideband is on while the carrier is off.
    """
    s = drive.sideband_amplitude
    if s and not drive.carrier_amplitude:
        raise FrameError("secular sideband needs a carrier axis; the carrier is off in this segment")

    blocks = _blocks(params.cutoff.n_max)
    x = _carrier_part(params, drive, blocks)
    if s:
        rotor = np.exp(-1j * params.delta * t)
        phi = _carrier_phase(params, drive)
        for j, (omega_j, phase_j) in enumerate(zip(params.omega_j, _sideband_phases(params, drive))):
            coeff = 0.5j * omega_j * s * rotor
            x = x + coeff * (
                np.exp(1j * phase_j) * blocks.blue[j]
                + np.exp(1j * (phase_j - 2.0 * phi)) * blocks.blue_flip[j]
            )
    return _hermitian(x)


def _require_dressed(params: GateParams, drive: DriveSnapshot) -> None:
    if not drive.carrier_on:
        raise FrameError("the dressed frame needs the carrier drive on")
    if abs(math.remainder(_carrier_phase(params, drive), 2.0 * math.pi)) > PHASE_TOL:
        raise FrameError("the dressed frame is defined for carrier phase 0 only")


def _force_part(params: GateParams, drive: DriveSnapshot, t: float, blocks: _Blocks) -> np.ndarray:
    x = np.zeros_like(blocks.raising)
    s = drive.sideband_amplitude
    if not s:
        return x
    rotor = np.exp(-1j * params.delta * t)
    for j, (omega_j, phase_j) in enumerate(zip(params.omega_j, _sideband_phases(params, drive))):
        x = x + 0.5j * omega_j * s * rotor * np.exp(1j * phase_j) * blocks.dressed_z[j]
    return _hermitian(x)


def h_dressed_rwa(params: GateParams, drive: DriveSnapshot, t: float) -> np.ndarray:
    """
    Spin-dependent force in the dressed basis:
    sum_j (i Omega_j / 2) Z_j (a_dag e^{-i delta t} e^{i phi'_j} - h.c.).

    Commutes with every |+-><+-|_j projector.
    """
    _require_dressed(params, drive)
    return _force_part(params, drive, t, _blocks(params.cutoff.n_max))


def h_dressed(params: GateParams, drive: DriveSnapshot, t: float) -> np.ndarray:
    """
    Force term plus the off-resonant flip term
    sum_j (i Omega_j / 2)(|-><+|_j e^{-2i Omega_C t} - |+><-|_j e^{2i Omega_C t})(a_dag e^{-i delta t} e^{i phi'_j} + h.c.).
    """
    _require_dressed(params, drive)
    blocks = _blocks(params.cutoff.n_max)
    h = _force_part(params, drive, t, blocks)
    s = drive.sideband_amplitude
    if not s:
        return h

    omega_c = params.omega_C * drive.carrier_amplitude
    flip_down = np.exp(-2j * omega_c * t)
    rotor = np.exp(-1j * params.delta * t)
    for j, (omega_j, phase_j) in enumerate(zip(params.omega_j, _sideband_phases(params, drive))):
        motion = rotor * np.exp(1j * phase_j) * blocks.raising
        motion = motion + motion.conj().T
        spin = flip_down * blocks.dressed_minus[j] - np.conj(flip_down) * blocks.dressed_plus[j]
        h = h + 0.5j * omega_j * s * (spin @ motion)
    return h


_BUILDERS: dict[str, Callable[[GateParams, DriveSnapshot, float], np.ndarray]] = {
    'full': h_lab,
    'rwa': h_lab_rwa,
    'dressed': h_dressed,
    'dressed_rwa': h_dressed_rwa,
}


def build_hamiltonian(
    params: GateParams,
    drive: DriveSnapshot,
    model: HamiltonianModel = 'full',
) -> Callable[[float], np.ndarray]:
    """Returns t -> H(t)/hbar for one drive configuration."""
    builder = _BUILDERS.get(model)
    if builder is None:
        raise ValueError(f"Unknown Hamiltonian model: {model}")
    if model in ('dressed', 'dressed_rwa'):
        _require_dressed(params, drive)

    def hamiltonian(t: float) -> np.ndarray:
        return builder(params, drive, t)

    return hamiltonian


def dressed_frame_unitary(params: GateParams, t: float) -> np.ndarray:
    """(D x D x 1) exp(+i Omega_C t sum_j sigma_x_j)."""
    rotation = expm(1j * params.omega_C * t * SIGMA_X)
    spin = dressed_change_of_basis() @ np.kron(rotation, rotation)
    return embed_spin_pair(spin, params.cutoff)


def _check_constant_carrier(sequence: PulseSequence, t: float) -> None:
    elapsed = 0.0
    reference: DriveSnapshot | None = None
    for index, seg in enumerate(sequence.segments):
        if elapsed >= t:
            break
        drive = seg.drive
        if not drive.carrier_on:
            raise FrameError(f"carrier off in segment {index}; dressed frame undefined")
        if reference is not None and (
            drive.carrier_phase != reference.carrier_phase or drive.carrier_scale != reference.carrier_scale
        ):
            raise FrameError(f"carrier phase or amplitude changes at segment {index}; dressed frame undefined")
        reference = drive
        elapsed += seg.duration
        if seg.frame_shift and elapsed < t:
            raise FrameError(f"phase-frame update after segment {index}; dressed frame undefined")


def to_dressed_frame(
    state: CompositeState,
    params: GateParams,
    t: float,
    sequence: PulseSequence | None = None,
) -> CompositeState:
    """
    Maps a lab-frame state at time t into dressed coordinates.

    Lab evolution under `full` followed by this map equals dressed evolution
    under `dressed`. The frame assumes the carrier has been on at constant
    amplitude and phase 0 since t = 0; pass the sequence to have that checked.

    Raises:
        FrameError: carrier phase non-zero, or the sequence changes the carrier before t.
    """
    if abs(math.remainder(params.phi, 2.0 * math.pi)) > PHASE_TOL:
        raise FrameError("the dressed frame is defined for carrier phase 0 only")
    if sequence is not None:
        _check_constant_carrier(sequence, t)

    u = dressed_frame_unitary(params, t)
    if state.is_pure:
        out = u @ state.amplitudes
    else:
        out = u @ state.amplitudes @ u.conj().T
    return CompositeState.from_propagation(state.representation, out, state.cutoff, state.diagnostics)
