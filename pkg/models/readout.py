# models/readout.py
from __future__ import annotations

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

PROB_TOL = 1e-9


class DetectionModel(BaseModel):
    """Fluorescence count statistics of the state-dependent readout."""
    model_config = ConfigDict(frozen=True)

    mean_counts_per_bright_ion: float = Field(default=30.0, ge=0)
    mean_background_counts: float = Field(default=3.0, ge=0)
    detection_window: float = Field(default=250e-6, gt=0)   # metadata only

    def class_means(self) -> tuple[float, float, float]:
        """Poisson means for zero, one and two bright ions."""
        bg, ion = self.mean_background_counts, self.mean_counts_per_bright_ion
        return (bg, bg + ion, bg + 2.0 * ion)


class PopulationProbs(BaseModel):
    """
    Readout class probabilities.

    P0: no ion bright (|up up>), P2: both bright (|down down>), P1: one bright.
    """
    model_config = ConfigDict(frozen=True)

    P0: float = Field(ge=0, le=1)
    P1: float = Field(ge=0, le=1)
    P2: float = Field(ge=0, le=1)

    @model_validator(mode='after')
    def _check_sum(self) -> PopulationProbs:
        total = self.P0 + self.P1 + self.P2
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"populations must sum to 1, got {total:.12f}")
        return self

    @classmethod
    def from_values(cls, p0: float, p1: float, p2: float) -> PopulationProbs:
        """Clips round-off below zero and renormalises before validating."""
        vals = [min(max(v, 0.0), 1.0) for v in (p0, p1, p2)]
        total = sum(vals)
        return cls(P0=vals[0] / total, P1=vals[1] / total, P2=vals[2] / total)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.P0, self.P1, self.P2)


class CountHistogram(BaseModel):
    """counts[k] is the number of detection shots that registered k photons."""
    model_config = ConfigDict(frozen=True)

    counts: tuple[float, ...]

    @model_validator(mode='after')
    def _check_counts(self) -> CountHistogram:
        if not self.counts:
            raise ValueError("histogram must have at least one bin")
        if any(c < 0 for c in self.counts):
            raise ValueError("histogram bins must be non-negative")
        return self

    @property
    def shots(self) -> float:
        return sum(self.counts)

    @property
    def mean(self) -> float:
        return sum(k * c for k, c in enumerate(self.counts)) / self.shots


class PoissonMixtureFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    populations: PopulationProbs
    stderr: tuple[float, float, float]
    cov_p0_p2: float = 0.0
    lambda_background: float
    lambda_ion: float
    lambda_stderr: tuple[float, float] | None = None
    log_likelihood: float
    iterations: int
    identifiable: bool = True


class ParityFit(BaseModel):
    """Least-squares fit of A cos(2 phi + phi0) + B with A >= 0."""
    model_config = ConfigDict(frozen=True)

    A: float
    phi0: float
    B: float
    stderr_A: float = 0.0
    stderr_phi0: float = 0.0
    stderr_B: float = 0.0
    residual_rms: float = 0.0
    condition_number: float = 1.0
    n_points: int = 0

    @model_validator(mode='after')
    def _check_contrast(self) -> ParityFit:
        if self.A > 1.0 + 3.0 * self.stderr_A + 1e-6:
            raise ValueError(f"fitted contrast {self.A:.6f} exceeds 1 by more than 3 standard errors")
        return self


class FidelityEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    fidelity: float
    stderr: float = 0.0


class ParityScan(BaseModel):
    """Parity values on the analysis-phase grid together with their fit."""
    model_config = ConfigDict(frozen=True)

    phis: tuple[float, ...]
    parity: tuple[float, ...]
    stderr: tuple[float, ...] | None = None
    populations: tuple[PopulationProbs, ...] = ()
    fit: ParityFit
