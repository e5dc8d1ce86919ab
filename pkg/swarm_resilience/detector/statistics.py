# swarm_resilience/detector/statistics.py

"""
Windowed Gaussian summaries and the log-likelihood ratio between the primary
stream and a fault-free backup reference.

H1 evaluates the primary samples under the primary summary, H0 evaluates the
same samples under the backup summary:

    LLR = (N/2) ln(|S_b| / |S_p|)
          - 1/2 sum_k [(q_k - m_p)' S_p^-1 (q_k - m_p) - (q_k - m_b)' S_b^-1 (q_k - m_b)]

Classes:
    GaussianSummary: Mean, regularized covariance, scatter matrix and count.

Functions:
    summarize: Sample mean and unbiased covariance of a window.
    summarize_reference: Backup reference summary (zero covariance plus regularization).
    llr: Per-sample evaluation.
    llr_from_statistics: Sufficient-statistics evaluation.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from swarm_resilience.errors import InsufficientDataError, NumericError
from swarm_resilience.fault.channel import Measurement

DETECTION_DIMS = 2

Window = Union[Sequence[Measurement], Sequence[Sequence[float]], np.ndarray]


@dataclass(frozen=True, eq=False)
class GaussianSummary:
    """
    Attributes:
        mean: Sample mean (m).
        covariance: Regularized covariance (m^2).
        count: Number of samples N.
        scatter: Sum of outer products of deviations from the mean.
    """

    mean: np.ndarray
    covariance: np.ndarray
    count: int
    scatter: np.ndarray


def window_matrix(window: Window, dims: int = DETECTION_DIMS) -> np.ndarray:
    """Stack a window into an (N, dims) array of its first dims components."""
    rows = [m.value if isinstance(m, Measurement) else np.asarray(m, dtype=float) for m in window]
    if not rows:
        return np.empty((0, dims))
    matrix = np.vstack(rows)[:, :dims].astype(float)
    if not np.all(np.isfinite(matrix)):
        raise NumericError("Window contains non-finite samples")
    return matrix


def summarize(window: Window, eps_cov: float = 1e-4, dims: int = DETECTION_DIMS) -> GaussianSummary:
    """
    Sample mean and unbiased covariance with eps_cov added to the diagonal.

    Raises:
        InsufficientDataError: If the window holds fewer than two samples.
    """
    x = window_matrix(window, dims)
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError(f"Need at least 2 samples, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    scatter = centered.T @ centered
    covariance = scatter / (n - 1) + eps_cov * np.eye(x.shape[1])
    return GaussianSummary(mean=mean, covariance=covariance, count=n, scatter=scatter)


def summarize_reference(window: Window, eps_cov: float = 1e-4, dims: int = DETECTION_DIMS) -> GaussianSummary:
    """
    Backup reference summary: sample mean with a zero covariance regularized
    to eps_cov * I.

    Raises:
        InsufficientDataError: If the window is empty.
    """
    x = window_matrix(window, dims)
    n = x.shape[0]
    if n < 1:
        raise InsufficientDataError("Reference window is empty")
    mean = x.mean(axis=0)
    centered = x - mean
    return GaussianSummary(
        mean=mean,
        covariance=eps_cov * np.eye(x.shape[1]),
        count=n,
        scatter=centered.T @ centered,
    )


def _inverse_and_logdet(covariance: np.ndarray, det_floor: float) -> Tuple[np.ndarray, float]:
    if not np.all(np.isfinite(covariance)):
        raise NumericError("Covariance contains non-finite entries")
    det = float(np.linalg.det(covariance))
    if not np.isfinite(det) or det <= 0:
        raise NumericError(f"Covariance is not positive definite (det={det}); check eps_cov")
    try:
        inverse = np.linalg.inv(covariance)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"Covariance is singular despite regularization: {e}") from e
    return inverse, float(np.log(max(det, det_floor)))


def _quadratic_sum(deviations: np.ndarray, inverse: np.ndarray) -> float:
    return float(np.einsum("ij,jk,ik->", deviations, inverse, deviations))


def llr(
    primary: GaussianSummary,
    window: Window,
    backup: GaussianSummary,
    det_floor: float = 1e-12,
) -> float:
    """
    Log-likelihood ratio of the primary window, evaluated sample by sample.

    Args:
        primary: Summary of the primary window.
        window: The primary samples themselves.
        backup: Backup reference summary.
        det_floor: Lower clamp of covariance determinants before the log.

    Raises:
        NumericError: If a covariance is singular or not positive definite.
    """
    x = window_matrix(window, primary.mean.shape[0])
    n = x.shape[0]
    inv_p, logdet_p = _inverse_and_logdet(primary.covariance, det_floor)
    inv_b, logdet_b = _inverse_and_logdet(backup.covariance, det_floor)
    under_h1 = _quadratic_sum(x - primary.mean, inv_p)
    under_h0 = _quadratic_sum(x - backup.mean, inv_b)
    return 0.5 * n * (logdet_b - logdet_p) - 0.5 * (under_h1 - under_h0)


def llr_from_statistics(
    primary: GaussianSummary,
    backup: GaussianSummary,
    det_floor: float = 1e-12,
) -> float:
    """
    Same ratio as llr() from the primary scatter matrix alone:

        sum_k (q_k - m)' A (q_k - m) = tr(A S) + N (m_p - m)' A (m_p - m)
    """
    n = primary.count
    inv_p, logdet_p = _inverse_and_logdet(primary.covariance, det_floor)
    inv_b, logdet_b = _inverse_and_logdet(backup.covariance, det_floor)
    shift = primary.mean - backup.mean
    under_h1 = float(np.trace(inv_p @ primary.scatter))
    under_h0 = float(np.trace(inv_b @ primary.scatter)) + n * float(shift @ inv_b @ shift)
    return 0.5 * n * (logdet_b - logdet_p) - 0.5 * (under_h1 - under_h0)
