# swarm_resilience/detector/scoring.py

"""Detection accuracy and false positive rate against the fault schedule."""

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence, Union

import numpy as np

from swarm_resilience.errors import ScoringError

FlagSeries = Sequence[bool]


@dataclass(frozen=True)
class ScoreResult:
    accuracy: float
    false_positive_rate: float
    fault_ticks: int = 0
    clean_ticks: int = 0


def score(
    decisions: Union[Mapping[Hashable, FlagSeries], FlagSeries],
    truth: Union[Mapping[Hashable, FlagSeries], FlagSeries],
) -> ScoreResult:
    """
    Score per-tick fault verdicts against the true fault activity.

    Rates are computed per monitored link and averaged over links: accuracy
    over links that saw a fault, FPR over links that saw clean ticks. With
    no fault ticks at all accuracy is 1.0; with no clean ticks FPR is 0.0.

    Args:
        decisions: Link -> per-tick verdicts (or one series).
        truth: Link -> per-tick fault activity (or one series).

    Raises:
        ScoringError: If the links or tick ranges do not line up.
    """
    if not isinstance(decisions, Mapping):
        decisions = {0: decisions}
    if not isinstance(truth, Mapping):
        truth = {0: truth}
    if set(decisions) != set(truth):
        raise ScoringError(
            f"Decision links {sorted(map(str, decisions))} differ from truth links {sorted(map(str, truth))}"
        )

    accuracies, fprs = [], []
    fault_total = clean_total = 0
    for key in decisions:
        flags = np.asarray(decisions[key], dtype=bool)
        actual = np.asarray(truth[key], dtype=bool)
        if flags.shape != actual.shape:
            raise ScoringError(f"Link {key}: {flags.size} decisions vs {actual.size} truth ticks")
        faults = int(actual.sum())
        clean = int(actual.size - faults)
        fault_total += faults
        clean_total += clean
        if faults:
            accuracies.append(float((flags & actual).sum()) / faults)
        if clean:
            fprs.append(float((flags & ~actual).sum()) / clean)

    return ScoreResult(
        accuracy=float(np.mean(accuracies)) if accuracies else 1.0,
        false_positive_rate=float(np.mean(fprs)) if fprs else 0.0,
        fault_ticks=fault_total,
        clean_ticks=clean_total,
    )
