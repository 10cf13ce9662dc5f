# dynamics/ensemble.py
from __future__ import annotations

import logging
from collections.abc import Callable
from collections.abc import Sequence
from typing import Any
from typing import TypeVar

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict

from helper.workers import map_ordered
from models.state import CompositeState

logger = logging.getLogger(__name__)

D = TypeVar('D')
R = TypeVar('R')


class EnsembleResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    outcomes: tuple[Any, ...]
    mean: Any
    shots: int
    seed: int


def shot_generators(seed: int, shots: int) -> list[np.random.Generator]:
    """One independent generator per shot, indexed by shot number."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(shots)]


def average_states(states: Sequence[CompositeState]) -> CompositeState:
    """Equal-weight mixture, accumulated in shot order."""
    if not states:
        raise ValueError("cannot average an empty ensemble")
    total = np.zeros((states[0].dim, states[0].dim), dtype=complex)
    diagnostics: dict[str, float] = {}
    for state in states:
        total += state.density()
        for key, value in state.diagnostics.items():
            if key == 'min_eigenvalue':
                diagnostics[key] = min(value, diagnostics.get(key, value))
            else:
                diagnostics[key] = max(value, diagnostics.get(key, value))
    return CompositeState.from_propagation('density', total / len(states), states[0].cutoff, diagnostics)


def mean_outcome(outcomes: Sequence[Any]) -> Any:
    if isinstance(outcomes[0], CompositeState):
        return average_states(outcomes)
    mean = np.mean(np.asarray(outcomes, dtype=float), axis=0)
    return float(mean) if np.ndim(mean) == 0 else mean


def monte_carlo_ensemble(
    experiment: Callable[[D], R],
    sampler: Callable[[np.random.Generator], D],
    shots: int,
    seed: int,
    workers: int | None = None,
    reduce: Callable[[Sequence[R]], Any] | None = None,
) -> EnsembleResult:
    """
    Runs `experiment` once per parameter draw and averages the outcomes.

    Draws are taken from per-shot substreams of `seed` before dispatch, so
    outcomes and their mean do not depend on the worker count.
    """
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")

    draws = [sampler(rng) for rng in shot_generators(seed, shots)]
    outcomes = map_ordered(experiment, draws, workers)
    mean = (reduce or mean_outcome)(outcomes)
    logger.info(f"Monte-Carlo ensemble: {shots} shots, seed {seed}")
    return EnsembleResult(outcomes=tuple(outcomes), mean=mean, shots=shots, seed=seed)
