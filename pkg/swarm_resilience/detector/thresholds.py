# swarm_resilience/detector/thresholds.py

"""
Dynamic detection and recovery thresholds over a population of LLR values.

Order statistics use 1-based ceiling indexing without interpolation, so
thresholds are reproducible bit for bit.
"""

import math
from typing import Sequence

from swarm_resilience.errors import InsufficientDataError


def _sorted_values(llrs: Sequence[float]) -> list:
    if len(llrs) == 0:
        raise InsufficientDataError("LLR population is empty")
    return sorted(float(v) for v in llrs)


def order_statistic(sorted_values: Sequence[float], q: float) -> float:
    """sorted[ceil(q * m)] with 1-based indexing, clamped to [1, m]."""
    m = len(sorted_values)
    index = min(max(math.ceil(q * m), 1), m)
    return sorted_values[index - 1]


def pooled_median(llrs: Sequence[float]) -> float:
    return order_statistic(_sorted_values(llrs), 0.5)


def detection_threshold(llrs: Sequence[float]) -> float:
    """median + 1.5 * (Q3 - Q1)"""
    values = _sorted_values(llrs)
    q1 = order_statistic(values, 0.25)
    q3 = order_statistic(values, 0.75)
    return order_statistic(values, 0.5) + 1.5 * (q3 - q1)


def recovery_threshold(llrs: Sequence[float], theta: float) -> float:
    """min + theta * (max - min)"""
    values = _sorted_values(llrs)
    return values[0] + theta * (values[-1] - values[0])
