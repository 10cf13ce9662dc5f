# tests/conftest.py
from __future__ import annotations

import numpy as np
import pytest

from models.config import IntegratorConfig
from models.params import GateParams

# Small enough for fast closed-loop runs, large enough for the displacement of one loop.
TEST_N_MAX = 8


@pytest.fixture
def laser_params() -> GateParams:
    return GateParams.preset('laser', n_max=TEST_N_MAX)


@pytest.fixture
def microwave_params() -> GateParams:
    return GateParams.preset('microwave', n_max=TEST_N_MAX)


@pytest.fixture
def tight_cfg() -> IntegratorConfig:
    return IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, max_step=1e-6)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
