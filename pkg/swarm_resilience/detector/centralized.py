# swarm_resilience/detector/centralized.py

"""
Centralized Bayes likelihood-ratio benchmark.

With oracle knowledge of the offset and the channel noise, a central node
compares each batch of samples under the clean model f0 and the faulty
model f1. The decision threshold is calibrated per noise level on synthetic
labeled data to maximize the balanced accuracy (TPR + TNR) / 2.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import multivariate_normal

from swarm_resilience.detector.scoring import ScoreResult, score
from swarm_resilience.detector.statistics import DETECTION_DIMS, GaussianSummary
from swarm_resilience.fault.channel import ChannelModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    balanced_accuracy: float
    true_positive_rate: float
    true_negative_rate: float


def benchmark_models(
    offset: Sequence[float],
    channel: ChannelModel,
    eps_cov: float = 1e-4,
    hops: int = 1,
) -> Tuple[GaussianSummary, GaussianSummary]:
    """Clean (f0) and faulty (f1) measurement models around a zero relative position."""
    covariance = (hops * channel.sigma_e_sq + eps_cov) * np.eye(DETECTION_DIMS)
    zeros = np.zeros((DETECTION_DIMS, DETECTION_DIMS))
    f0 = GaussianSummary(mean=np.zeros(DETECTION_DIMS), covariance=covariance, count=1, scatter=zeros)
    f1 = GaussianSummary(
        mean=np.asarray(offset, dtype=float)[:DETECTION_DIMS], covariance=covariance, count=1, scatter=zeros
    )
    return f0, f1


def log_likelihood_ratio(samples, f0: GaussianSummary, f1: GaussianSummary) -> float:
    """ln f1(batch) - ln f0(batch) for independent samples."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))[:, :DETECTION_DIMS]
    under_f1 = np.atleast_1d(multivariate_normal.logpdf(x, mean=f1.mean, cov=f1.covariance))
    under_f0 = np.atleast_1d(multivariate_normal.logpdf(x, mean=f0.mean, cov=f0.covariance))
    return float(np.sum(under_f1 - under_f0))


def centralized_decide(samples, f0: GaussianSummary, f1: GaussianSummary, threshold: float) -> bool:
    """Faulty when the batch log-likelihood ratio exceeds threshold (log scale)."""
    return log_likelihood_ratio(samples, f0, f1) > threshold


def _draw(f: GaussianSummary, rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.multivariate_normal(f.mean, f.covariance, size=size)


def balanced_accuracy_curve(scores: np.ndarray, labels: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """(TPR + TNR) / 2 for every candidate threshold."""
    faulty = scores[labels]
    clean = scores[~labels]
    tpr = (faulty[None, :] > thresholds[:, None]).mean(axis=1) if faulty.size else np.ones(len(thresholds))
    tnr = (clean[None, :] <= thresholds[:, None]).mean(axis=1) if clean.size else np.ones(len(thresholds))
    return 0.5 * (tpr + tnr)


def calibrate_threshold(
    f0: GaussianSummary,
    f1: GaussianSummary,
    rng: np.random.Generator,
    n_samples: int = 2000,
    grid_size: int = 201,
) -> CalibrationResult:
    """
    Sweep candidate thresholds over synthetic labeled samples (half clean,
    half faulty) and keep the one maximizing (TPR + TNR) / 2; the lowest
    threshold wins ties.
    """
    half = max(1, n_samples // 2)
    samples = np.vstack([_draw(f0, rng, half), _draw(f1, rng, half)])
    labels = np.concatenate([np.zeros(half, dtype=bool), np.ones(half, dtype=bool)])
    scores = (
        multivariate_normal.logpdf(samples, mean=f1.mean, cov=f1.covariance)
        - multivariate_normal.logpdf(samples, mean=f0.mean, cov=f0.covariance)
    )
    grid = np.unique(np.quantile(scores, np.linspace(0.0, 1.0, grid_size)))
    curve = balanced_accuracy_curve(scores, labels, grid)
    best = int(np.argmax(curve))
    faulty, clean = scores[labels], scores[~labels]
    return CalibrationResult(
        threshold=float(grid[best]),
        balanced_accuracy=float(curve[best]),
        true_positive_rate=float((faulty > grid[best]).mean()),
        true_negative_rate=float((clean <= grid[best]).mean()),
    )


def run_centralized_benchmark(
    p_f: float,
    channel: ChannelModel,
    offset: Sequence[float],
    ticks: int,
    rng: np.random.Generator,
    eps_cov: float = 1e-4,
) -> ScoreResult:
    """
    Score the calibrated centralized test on a Bernoulli(p_f) fault sequence
    of single-sample ticks.
    """
    f0, f1 = benchmark_models(offset, channel, eps_cov)
    calibration = calibrate_threshold(f0, f1, rng)
    labels = rng.random(ticks) < p_f
    clean = _draw(f0, rng, ticks)
    shifted = clean + (f1.mean - f0.mean)
    samples = np.where(labels[:, None], shifted, clean)
    ratios = (
        multivariate_normal.logpdf(samples, mean=f1.mean, cov=f1.covariance)
        - multivariate_normal.logpdf(samples, mean=f0.mean, cov=f0.covariance)
    )
    decisions = np.atleast_1d(ratios) > calibration.threshold
    logger.debug(
        f"Centralized benchmark p_f={p_f} p_e={channel.p_e}: threshold {calibration.threshold:.4f}"
    )
    return score(decisions, labels)
