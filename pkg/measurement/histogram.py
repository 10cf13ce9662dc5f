# measurement/histogram.py
"""
Synthetic fluorescence histograms and the three-component Poisson mixture fit.

Count classes are indexed by the number of bright ions c = 0, 1, 2 with
Poisson means lambda_bg + c * lambda_ion.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from models.errors import FitError
from models.readout import CountHistogram
from models.readout import DetectionModel
from models.readout import PoissonMixtureFit
from models.readout import PopulationProbs

logger = logging.getLogger(__name__)

MIN_SHOTS = 100
SHOT_BLOCK = 1024
LAMBDA_FLOOR = 1e-9
_CLASSES = np.arange(3)


def simulate_histogram(p: PopulationProbs, det: DetectionModel, shots: int, seed: int) -> CountHistogram:
    """
    Per shot: draw the bright-ion class from p, then a Poisson count.

    Shots are generated in fixed-size blocks, each from its own substream of
    `seed`, so the histogram depends only on (p, det, shots, seed).
    """
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")
    means = np.array(det.class_means())
    weights = np.array(p.as_tuple())
    n_blocks = -(-shots // SHOT_BLOCK)
    counts = []
    for block, child in enumerate(np.random.SeedSequence(seed).spawn(n_blocks)):
        rng = np.random.default_rng(child)
        size = min(SHOT_BLOCK, shots - block * SHOT_BLOCK)
        classes = rng.choice(3, size=size, p=weights / weights.sum())
        counts.append(rng.poisson(means[classes]))
    return CountHistogram(counts=tuple(int(c) for c in np.bincount(np.concatenate(counts))))


def expected_histogram(p: PopulationProbs, det: DetectionModel, shots: float = 1e6, tail: float = 1e-15) -> CountHistogram:
    """Infinite-shot limit: shots times the mixture pmf, truncated where the tail is below `tail`."""
    means = np.array(det.class_means())
    top = int(stats.poisson.isf(tail, means.max())) + 1
    k = np.arange(top + 1)
    pmf = np.array(p.as_tuple()) @ stats.poisson.pmf(k[None, :], means[:, None])
    return CountHistogram(counts=tuple(float(v) for v in shots * pmf))


def _log_components(k: np.ndarray, lam_bg: float, lam_ion: float) -> np.ndarray:
    mu = lam_bg + _CLASSES * lam_ion
    return stats.poisson.logpmf(k[None, :], mu[:, None])


def _update_lambdas(k: np.ndarray, n_ck: np.ndarray, lam_bg: float, lam_ion: float) -> tuple[float, float]:
    """
    Newton solve of the Poisson M-step, maximising
    sum_c [S_c log(mu_c) - N_c mu_c] with mu_c = lam_bg + c * lam_ion.
    """
    s_c = n_ck @ k
    n_c = n_ck.sum(axis=1)
    theta = np.array([lam_bg, lam_ion])
    design = np.stack([np.ones(3), _CLASSES.astype(float)], axis=1)
    if np.count_nonzero(n_c > 1e-6 * n_c.sum()) < 2:
        # a single populated class cannot fix lam_ion; move lam_bg only
        design = design[:, :1]
        theta = theta[:1]
        offset = _CLASSES * lam_ion
    else:
        offset = np.zeros(3)
    for _ in range(50):
        mu = design @ theta + offset
        grad = design.T @ (s_c / mu - n_c)
        hess = -(design.T * (s_c / mu ** 2)) @ design
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        while np.any(design @ (theta - scale * step) + offset <= 0) or np.any(theta - scale * step < 0):
            scale *= 0.5
            if scale < 1e-12:
                break
        theta = np.maximum(theta - scale * step, LAMBDA_FLOOR)
        if np.max(np.abs(scale * step)) < 1e-13 * (1.0 + np.max(theta)):
            break
    if theta.size == 1:
        return float(theta[0]), lam_ion
    return float(theta[0]), float(theta[1])


def _observed_information(
    k: np.ndarray, n_k: np.ndarray, w: np.ndarray, lam_bg: float, lam_ion: float, free_lambdas: bool,
) -> np.ndarray:
    """Negative Hessian of the log-likelihood in (w0, w1[, lam_bg, lam_ion])."""
    mu = lam_bg + _CLASSES * lam_ion
    f = stats.poisson.pmf(k[None, :], mu[:, None])
    ratio = k[None, :] / mu[:, None]
    f1 = f * (ratio - 1.0)
    f2 = f * ((ratio - 1.0) ** 2 - k[None, :] / mu[:, None] ** 2)
    m = np.maximum(w @ f, np.finfo(float).tiny)

    grads = [f[0] - f[2], f[1] - f[2]]
    second: dict[tuple[int, int], np.ndarray] = {}
    if free_lambdas:
        grads.append(w @ f1)
        grads.append((w * _CLASSES) @ f1)
        second[(0, 2)] = f1[0] - f1[2]
        second[(0, 3)] = -2.0 * f1[2]
        second[(1, 2)] = f1[1] - f1[2]
        second[(1, 3)] = f1[1] - 2.0 * f1[2]
        second[(2, 2)] = w @ f2
        second[(2, 3)] = (w * _CLASSES) @ f2
        second[(3, 3)] = (w * _CLASSES ** 2) @ f2

    size = len(grads)
    info = np.zeros((size, size))
    for a in range(size):
        for b in range(a, size):
            m_ab = second.get((a, b), 0.0)
            value = -np.sum(n_k * (m_ab / m - grads[a] * grads[b] / m ** 2))
            info[a, b] = info[b, a] = value
    return info


def fit_poisson_mixture(
    hist: CountHistogram,
    guess: DetectionModel | None = None,
    *,
    freeze_lambdas: bool = False,
    max_iter: int = 5000,
    tol: float = 1e-11,
) -> PoissonMixtureFit:
    """
    Maximum-likelihood fit of the three-component Poisson mixture by EM.

    Weight standard errors come from the observed information matrix. With
    freeze_lambdas the count means stay at the values of `guess`.

    Raises:
        FitError: fewer than 100 shots.
    """
    guess = guess or DetectionModel()
    n_k = np.asarray(hist.counts, dtype=float)
    shots = n_k.sum()
    if shots < MIN_SHOTS:
        raise FitError(f"need at least {MIN_SHOTS} shots for a mixture fit, got {shots:g}")

    k = np.arange(n_k.size, dtype=float)
    occupied = np.flatnonzero(n_k)
    identifiable = occupied.size > 1

    lam_bg, lam_ion = guess.mean_background_counts, guess.mean_counts_per_bright_ion
    w = np.full(3, 1.0 / 3.0)
    log_lik = -np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        log_joint = np.log(np.maximum(w, 1e-300))[:, None] + _log_components(k, lam_bg, lam_ion)
        log_m = logsumexp(log_joint, axis=0)
        new_log_lik = float(n_k @ log_m)
        resp = np.exp(log_joint - log_m[None, :])
        n_ck = resp * n_k[None, :]

        w_new = n_ck.sum(axis=1) / shots
        if not freeze_lambdas and identifiable:
            lam_bg_new, lam_ion_new = _update_lambdas(k, n_ck, lam_bg, lam_ion)
        else:
            lam_bg_new, lam_ion_new = lam_bg, lam_ion

        change = max(np.max(np.abs(w_new - w)), abs(lam_bg_new - lam_bg), abs(lam_ion_new - lam_ion))
        w, lam_bg, lam_ion = w_new, lam_bg_new, lam_ion_new
        if change < tol and abs(new_log_lik - log_lik) <= tol * (1.0 + abs(new_log_lik)):
            log_lik = new_log_lik
            break
        log_lik = new_log_lik
    else:
        logger.warning(f"Poisson mixture EM stopped after {max_iter} iterations without converging")

    populations = PopulationProbs.from_values(*w)
    if not identifiable:
        logger.warning("histogram occupies a single count bin; mixture weights are not identifiable")
        return PoissonMixtureFit(
            populations=populations,
            stderr=(float('inf'),) * 3,
            lambda_background=lam_bg,
            lambda_ion=lam_ion,
            log_likelihood=log_lik,
            iterations=iterations,
            identifiable=False,
        )

    free = not freeze_lambdas
    info = _observed_information(k, n_k, w, lam_bg, lam_ion, free)
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(info)
    var0, var1, cov01 = cov[0, 0], cov[1, 1], cov[0, 1]
    var2 = var0 + var1 + 2.0 * cov01
    stderr = tuple(float(np.sqrt(max(v, 0.0))) for v in (var0, var1, var2))
    lambda_stderr = (
        (float(np.sqrt(max(cov[2, 2], 0.0))), float(np.sqrt(max(cov[3, 3], 0.0)))) if free else None
    )
    return PoissonMixtureFit(
        populations=populations,
        stderr=stderr,
        cov_p0_p2=float(-var0 - cov01),
        lambda_background=lam_bg,
        lambda_ion=lam_ion,
        lambda_stderr=lambda_stderr,
        log_likelihood=log_lik,
        iterations=iterations,
        identifiable=True,
    )
