"""LLR fault detection, dynamic thresholds, routing decisions and scoring."""

from swarm_resilience.detector.centralized import (
    CalibrationResult,
    balanced_accuracy_curve,
    benchmark_models,
    calibrate_threshold,
    centralized_decide,
    log_likelihood_ratio,
    run_centralized_benchmark,
)
from swarm_resilience.detector.monitor import DecisionLog, ParentMonitor, decide
from swarm_resilience.detector.scoring import ScoreResult, score
from swarm_resilience.detector.statistics import (
    GaussianSummary,
    llr,
    llr_from_statistics,
    summarize,
    summarize_reference,
)
from swarm_resilience.detector.thresholds import detection_threshold, pooled_median, recovery_threshold

__all__ = [
    "CalibrationResult",
    "balanced_accuracy_curve",
    "benchmark_models",
    "calibrate_threshold",
    "centralized_decide",
    "log_likelihood_ratio",
    "run_centralized_benchmark",
    "DecisionLog",
    "ParentMonitor",
    "decide",
    "ScoreResult",
    "score",
    "GaussianSummary",
    "llr",
    "llr_from_statistics",
    "summarize",
    "summarize_reference",
    "detection_threshold",
    "pooled_median",
    "recovery_threshold",
]
