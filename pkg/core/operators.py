# core/operators.py
"""
Operators on (ion 1 spin) x (ion 2 spin) x (motional mode).

Single-ion matrices use the basis (|up>, |down>), so sigma_plus = |up><down|.
Every constructor returns a fresh array; cached building blocks are read-only.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Literal
from typing import NamedTuple

import numpy as np

from models.params import FockCutoff

Site = Literal['ion1', 'ion2', 'motion']

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)

for _m in (IDENTITY_2, SIGMA_PLUS, SIGMA_MINUS, SIGMA_X, SIGMA_Y, SIGMA_Z, HADAMARD):
    _m.setflags(write=False)

HERMITIAN_TOL = 1e-12


def _n_max(cutoff: FockCutoff | int) -> int:
    n_max = cutoff.n_max if isinstance(cutoff, FockCutoff) else int(cutoff)
    if n_max < 1:
        raise ValueError(f"Fock cutoff must keep at least levels 0 and 1, got n_max={n_max}")
    return n_max


@lru_cache(maxsize=32)
def _ladder(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    lowering = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    raising = lowering.conj().T.copy()
    lowering.setflags(write=False)
    raising.setflags(write=False)
    return lowering, raising


def ladder_operators(cutoff: FockCutoff | int) -> tuple[np.ndarray, np.ndarray]:
    """
    Truncated (a, a_dagger) on levels 0..n_max.

    <n-1|a|n> = sqrt(n); the commutator is the identity except for the
    corner element -n_max introduced by the truncation.

    Raises:
        ValueError: n_max < 1.
    """
    lowering, raising = _ladder(_n_max(cutoff))
    return lowering.copy(), raising.copy()


def sigma_phi(phi: float) -> np.ndarray:
    """Spin operator along the equatorial axis phi: cos(phi) X - sin(phi) Y."""
    return np.exp(1j * phi) * SIGMA_PLUS + np.exp(-1j * phi) * SIGMA_MINUS


def embed(op: np.ndarray, site: Site, cutoff: FockCutoff | int | None = None) -> np.ndarray:
    """
    Place a single-factor operator into the composite space.

    With cutoff=None the motional factor is dropped and the result acts on
    the 4-dimensional two-spin space.
    """
    factors: list[np.ndarray] = [IDENTITY_2, IDENTITY_2]
    if site == 'ion1':
        factors[0] = op
    elif site == 'ion2':
        factors[1] = op
    if cutoff is not None:
        dim = _n_max(cutoff) + 1
        factors.append(op if site == 'motion' else np.eye(dim, dtype=complex))
    elif site == 'motion':
        raise ValueError("a motional operator needs a Fock cutoff")
    out = factors[0]
    for factor in factors[1:]:
        out = np.kron(out, factor)
    return out


def embed_spin_pair(op_spin: np.ndarray, cutoff: FockCutoff | int | None = None) -> np.ndarray:
    """Two-ion 4x4 operator tensored with the motional identity."""
    if cutoff is None:
        return np.array(op_spin, dtype=complex)
    return np.kron(op_spin, np.eye(_n_max(cutoff) + 1, dtype=complex))


class SpinOperators(NamedTuple):
    """Per-ion operators; index 0 is ion 1, index 1 is ion 2."""
    sigma_plus: tuple[np.ndarray, np.ndarray]
    sigma_minus: tuple[np.ndarray, np.ndarray]
    sigma_x: tuple[np.ndarray, np.ndarray]
    sigma_y: tuple[np.ndarray, np.ndarray]
    sigma_z: tuple[np.ndarray, np.ndarray]


def spin_operators(cutoff: FockCutoff | int | None = None) -> SpinOperators:
    def pair(single: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return embed(single, 'ion1', cutoff), embed(single, 'ion2', cutoff)

    return SpinOperators(
        sigma_plus=pair(SIGMA_PLUS),
        sigma_minus=pair(SIGMA_MINUS),
        sigma_x=pair(SIGMA_X),
        sigma_y=pair(SIGMA_Y),
        sigma_z=pair(SIGMA_Z),
    )


def motion_operators(cutoff: FockCutoff | int) -> tuple[np.ndarray, np.ndarray]:
    """Embedded (a, a_dagger)."""
    lowering, raising = _ladder(_n_max(cutoff))
    return embed(lowering, 'motion', cutoff), embed(raising, 'motion', cutoff)


def dressed_change_of_basis() -> np.ndarray:
    """
    Two-ion map from (|up>, |down>) coordinates to (|+>, |->) coordinates.

    |up> = (|+> + |->)/sqrt(2), |down> = (|+> - |->)/sqrt(2). The map is a
    tensor square of the Hadamard matrix and therefore its own inverse.
    """
    return np.kron(HADAMARD, HADAMARD)


def dressed_projectors(cutoff: FockCutoff | int | None = None) -> tuple[np.ndarray, ...]:
    """
    (|+><+|_1, |-><-|_1, |+><+|_2, |-><-|_2) in dressed coordinates.
    """
    plus = np.diag([1.0, 0.0]).astype(complex)
    minus = np.diag([0.0, 1.0]).astype(complex)
    return (
        embed(plus, 'ion1', cutoff),
        embed(minus, 'ion1', cutoff),
        embed(plus, 'ion2', cutoff),
        embed(minus, 'ion2', cutoff),
    )


def hermiticity_error(op: np.ndarray) -> float:
    return float(np.max(np.abs(op - op.conj().T))) if op.size else 0.0


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(op) <= tol


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
