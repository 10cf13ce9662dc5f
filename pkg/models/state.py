# models/state.py
from __future__ import annotations

from typing import Any
from typing import Literal

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator

from models.params import FockCutoff

Representation = Literal['pure', 'density']

NORM_TOL = 1e-9
EIGEN_FLOOR = -1e-8
SPIN_DIM = 4


def _frozen_array(value: Any) -> np.ndarray:
    arr = np.array(value, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


class MotionalState(BaseModel):
    """Reduced state of the stretch mode, always stored as a density matrix."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rho: np.ndarray
    cutoff: FockCutoff
    n_bar: float = Field(default=0.0, ge=0)
    truncated_weight: float = Field(default=0.0, ge=0)

    @field_validator('rho', mode='before')
    @classmethod
    def _copy_rho(cls, value: Any) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode='after')
    def _check_shape(self) -> MotionalState:
        dim = self.cutoff.dim
        if self.rho.shape != (dim, dim):
            raise ValueError(f"motional density must be {dim}x{dim}, got {self.rho.shape}")
        return self

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho))

    @property
    def mean_occupation(self) -> float:
        return float(np.dot(np.arange(self.cutoff.dim), self.populations))

    @property
    def is_pure(self) -> bool:
        return abs(np.real(np.trace(self.rho @ self.rho)) - 1.0) < NORM_TOL


class CompositeState(BaseModel):
    """
    State of (ion 1 spin) x (ion 2 spin) x (truncated motional mode).

    Spin index a = 2*s1 + s2 with |up> = 0, |down> = 1; the full index is
    a * (n_max + 1) + n. Arrays are copied on construction and read-only.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    representation: Representation
    amplitudes: np.ndarray
    cutoff: FockCutoff
    diagnostics: dict[str, float] = Field(default_factory=dict)

    @field_validator('amplitudes', mode='before')
    @classmethod
    def _copy_amplitudes(cls, value: Any) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode='after')
    def _check_physical(self) -> CompositeState:
        dim = SPIN_DIM * self.cutoff.dim
        arr = self.amplitudes
        if self.representation == 'pure':
            if arr.shape != (dim,):
                raise ValueError(f"pure state must have shape ({dim},), got {arr.shape}")
            norm = np.linalg.norm(arr)
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"pure state must have unit norm, got {norm:.12f}")
            return self

        if arr.shape != (dim, dim):
            raise ValueError(f"density operator must have shape ({dim}, {dim}), got {arr.shape}")
        if np.max(np.abs(arr - arr.conj().T)) > NORM_TOL:
            raise ValueError("density operator is not Hermitian")
        trace = np.real(np.trace(arr))
        if abs(trace - 1.0) > NORM_TOL:
            raise ValueError(f"density operator must have unit trace, got {trace:.12f}")
        min_eig = float(np.min(np.linalg.eigvalsh(arr)))
        if min_eig < EIGEN_FLOOR:
            raise ValueError(f"density operator has negative eigenvalue {min_eig:.3e}")
        return self

    @classmethod
    def from_propagation(
        cls,
        representation: Representation,
        amplitudes: np.ndarray,
        cutoff: FockCutoff,
        diagnostics: dict[str, float] | None = None,
    ) -> CompositeState:
        """
        Wraps integrator output without re-validating it.

        Drift is carried in diagnostics instead of being rejected or corrected.
        """
        return cls.model_construct(
            representation=representation,
            amplitudes=_frozen_array(amplitudes),
            cutoff=cutoff,
            diagnostics=dict(diagnostics or {}),
        )

    @classmethod
    def product(cls, spin: np.ndarray, motion: MotionalState) -> CompositeState:
        """
        Tensor product of a two-ion spin state and a motional state.

        A spin ket combined with a pure motional state stays a ket; anything
        else becomes a density operator.
        """
        spin = np.asarray(spin, dtype=complex)
        if spin.shape not in ((SPIN_DIM,), (SPIN_DIM, SPIN_DIM)):
            raise ValueError(f"spin state must be a 4-vector or 4x4 matrix, got {spin.shape}")

        if spin.ndim == 1 and motion.is_pure:
            _, vecs = np.linalg.eigh(motion.rho)
            motion_ket = vecs[:, -1]
            # fix the arbitrary eigenvector phase on the largest component
            pivot = np.argmax(np.abs(motion_ket))
            motion_ket = motion_ket * np.exp(-1j * np.angle(motion_ket[pivot]))
            return cls(representation='pure', amplitudes=np.kron(spin, motion_ket), cutoff=motion.cutoff)

        spin_rho = np.outer(spin, spin.conj()) if spin.ndim == 1 else spin
        return cls(
            representation='density',
            amplitudes=np.kron(spin_rho, motion.rho),
            cutoff=motion.cutoff,
        )

    @property
    def dim(self) -> int:
        return SPIN_DIM * self.cutoff.dim

    @property
    def is_pure(self) -> bool:
        return self.representation == 'pure'

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.amplitudes, self.amplitudes.conj())
        return np.array(self.amplitudes)

    def spin_density(self) -> np.ndarray:
        """Reduced two-ion spin density matrix (motion traced out)."""
        d = self.cutoff.dim
        if self.is_pure:
            psi = self.amplitudes.reshape(SPIN_DIM, d)
            return psi @ psi.conj().T
        rho = self.amplitudes.reshape(SPIN_DIM, d, SPIN_DIM, d)
        return np.einsum('anbn->ab', rho)

    def motion_density(self) -> np.ndarray:
        """Reduced motional density matrix (spins traced out)."""
        d = self.cutoff.dim
        if self.is_pure:
            psi = self.amplitudes.reshape(SPIN_DIM, d)
            return psi.T @ psi.conj()
        rho = self.amplitudes.reshape(SPIN_DIM, d, SPIN_DIM, d)
        return np.einsum('anam->nm', rho)

    def expectation(self, op: np.ndarray) -> complex:
        if self.is_pure:
            return complex(np.vdot(self.amplitudes, op @ self.amplitudes))
        return complex(np.trace(op @ self.amplitudes))

    def norm_or_trace(self) -> float:
        if self.is_pure:
            return float(np.linalg.norm(self.amplitudes))
        return float(np.real(np.trace(self.amplitudes)))
