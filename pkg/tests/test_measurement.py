# tests/test_measurement.py
from __future__ import annotations

import math

import numpy as np
import pytest

from core.states import bell_state
from measurement.fidelity import bell_fidelity
from measurement.fidelity import bell_phase
from measurement.fidelity import fidelity_bell
from measurement.fidelity import fidelity_exact
from measurement.histogram import expected_histogram
from measurement.histogram import fit_poisson_mixture
from measurement.histogram import simulate_histogram
from measurement.parity import fit_parity
from measurement.parity import parity_scan
from measurement.parity import phase_grid
from measurement.populations import parity
from measurement.populations import populations_from_spin
from models.errors import FitError
from models.readout import CountHistogram
from models.readout import DetectionModel
from models.readout import PopulationProbs
from sequences.runner import analysis_unitary

DETECTION = DetectionModel()
MIXED = PopulationProbs(P0=0.2, P1=0.3, P2=0.5)


def _bell_density(phase: float = 0.0) -> np.ndarray:
    psi = bell_state(phase)
    return np.outer(psi, psi.conj())


# ----------------------------------------------------------------------------
# fidelity
# ----------------------------------------------------------------------------

def test_bell_fidelity_reproduces_the_quoted_values():
    assert bell_fidelity(0.494, 0.494, 0.960).fidelity == pytest.approx(0.974, abs=1e-12)
    assert bell_fidelity(0.4805, 0.4805, 0.930).fidelity == pytest.approx(0.9455, abs=1e-12)


def test_bell_fidelity_propagates_errors():
    est = bell_fidelity(0.49, 0.49, 0.95, sigma_p0=0.004, sigma_p2=0.003, sigma_a=0.008)
    assert est.stderr == pytest.approx(0.5 * math.sqrt(0.004 ** 2 + 0.003 ** 2 + 0.008 ** 2))


def test_bell_fidelity_rejects_invalid_inputs():
    with pytest.raises(ValueError):
        bell_fidelity(1.2, 0.0, 0.5)
    with pytest.raises(ValueError):
        bell_fidelity(0.5, 0.5, 0.9, sigma_a=-0.1)


def test_fidelity_of_a_bell_state_is_phase_free():
    for phase in (0.0, 1.1, -2.5):
        rho = _bell_density(phase)
        assert fidelity_bell(rho) == pytest.approx(1.0)
        assert bell_phase(rho) == pytest.approx(phase)
        assert fidelity_exact(rho, bell_state(phase)) == pytest.approx(1.0)
    assert fidelity_exact(_bell_density(0.0), bell_state(math.pi)) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_of_a_classical_mixture():
    rho = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    assert fidelity_bell(rho) == pytest.approx(0.5)


def test_populations_and_parity_of_a_bell_state():
    p = populations_from_spin(_bell_density())
    assert p.as_tuple() == pytest.approx((0.5, 0.0, 0.5))
    assert parity(p) == pytest.approx(1.0)


def test_population_probs_validate_the_sum():
    with pytest.raises(ValueError):
        PopulationProbs(P0=0.5, P1=0.5, P2=0.5)
    clipped = PopulationProbs.from_values(-1e-15, 0.5, 0.5)
    assert clipped.P0 == 0.0


# ----------------------------------------------------------------------------
# histograms
# ----------------------------------------------------------------------------

def test_simulated_histogram_is_reproducible():
    a = simulate_histogram(MIXED, DETECTION, 3000, seed=5)
    b = simulate_histogram(MIXED, DETECTION, 3000, seed=5)
    c = simulate_histogram(MIXED, DETECTION, 3000, seed=6)
    assert a == b
    assert a != c
    assert a.shots == 3000
    with pytest.raises(ValueError):
        simulate_histogram(MIXED, DETECTION, 0, seed=5)


def test_expected_histogram_has_the_mixture_mean():
    hist = expected_histogram(MIXED, DETECTION)
    expected = sum(p * m for p, m in zip(MIXED.as_tuple(), DETECTION.class_means()))
    assert hist.mean == pytest.approx(expected, rel=1e-9)


def test_mixture_fit_recovers_populations_from_the_infinite_shot_limit():
    fit = fit_poisson_mixture(expected_histogram(MIXED, DETECTION))
    assert fit.identifiable
    assert fit.populations.as_tuple() == pytest.approx(MIXED.as_tuple(), abs=1e-5)
    assert fit.lambda_ion == pytest.approx(DETECTION.mean_counts_per_bright_ion, rel=1e-4)
    assert fit.lambda_background == pytest.approx(DETECTION.mean_background_counts, rel=1e-3)


def test_mixture_fit_with_frozen_means():
    hist = simulate_histogram(MIXED, DETECTION, 5000, seed=3)
    fit = fit_poisson_mixture(hist, DETECTION, freeze_lambdas=True)
    assert fit.lambda_ion == DETECTION.mean_counts_per_bright_ion
    assert fit.lambda_stderr is None
    assert fit.populations.P2 == pytest.approx(0.5, abs=0.04)


def test_mixture_fit_needs_enough_shots():
    with pytest.raises(FitError):
        fit_poisson_mixture(CountHistogram(counts=(10, 20, 30)))


def test_single_bin_histogram_is_not_identifiable():
    fit = fit_poisson_mixture(CountHistogram(counts=(0, 0, 500)))
    assert not fit.identifiable
    assert all(math.isinf(s) for s in fit.stderr)


@pytest.mark.slow
def test_mixture_fit_errors_cover_the_truth():
    covered = 0
    trials = 100
    for seed in range(trials):
        fit = fit_poisson_mixture(simulate_histogram(MIXED, DETECTION, 2000, seed=seed))
        if abs(fit.populations.P2 - MIXED.P2) <= 2.0 * fit.stderr[2]:
            covered += 1
    assert covered >= 88


# ----------------------------------------------------------------------------
# parity
# ----------------------------------------------------------------------------

def test_fit_parity_recovers_an_exact_cosine():
    phis = phase_grid(16)
    values = 0.8 * np.cos(2 * phis + 0.6) + 0.05
    fit = fit_parity(phis, values)
    assert fit.A == pytest.approx(0.8)
    assert fit.phi0 == pytest.approx(0.6)
    assert fit.B == pytest.approx(0.05)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)
    assert fit.n_points == 16


def test_fit_parity_keeps_the_amplitude_non_negative():
    phis = phase_grid(12)
    fit = fit_parity(phis, -0.7 * np.cos(2 * phis))
    assert fit.A == pytest.approx(0.7)
    assert math.cos(fit.phi0) == pytest.approx(-1.0)


def test_fit_parity_rejects_too_few_points():
    phis = phase_grid(6)
    with pytest.raises(FitError):
        fit_parity(phis, np.cos(2 * phis))


def test_fit_parity_rejects_a_phase_gap():
    phis = np.linspace(0.0, 0.45 * math.pi, 10)
    with pytest.raises(FitError):
        fit_parity(phis, np.cos(2 * phis))


def test_fit_parity_weights_by_stderr():
    phis = phase_grid(24)
    values = 0.9 * np.cos(2 * phis)
    fit = fit_parity(phis, values, stderr=np.full(phis.size, 0.02))
    assert fit.A == pytest.approx(0.9)
    assert fit.stderr_A == pytest.approx(0.02 * math.sqrt(2 / 24), rel=1e-6)


def test_parity_scan_of_a_bell_state():
    rho = _bell_density(0.3)

    def readout(phi: float) -> PopulationProbs:
        u = analysis_unitary(phi)
        return populations_from_spin(u @ rho @ u.conj().T)

    scan = parity_scan(readout, workers=3)
    assert len(scan.phis) == len(scan.parity) == 24
    assert scan.stderr is None
    assert scan.fit.A == pytest.approx(1.0, abs=1e-9)
    assert scan.fit.B == pytest.approx(0.0, abs=1e-9)


def test_parity_scan_with_histogram_points_is_weighted():
    rho = 0.9 * _bell_density() + 0.025 * np.eye(4)

    def readout(phi: float):
        u = analysis_unitary(phi)
        p = populations_from_spin(u @ rho @ u.conj().T)
        return fit_poisson_mixture(expected_histogram(p, DETECTION, shots=2000))

    scan = parity_scan(readout, phase_grid(12), workers=1)
    assert scan.stderr is not None
    assert scan.fit.A == pytest.approx(0.9, abs=5e-3)
