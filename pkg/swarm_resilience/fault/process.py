# swarm_resilience/fault/process.py

"""
Intermittent offset faults on relative-position links.

While active, a fault adds a constant offset (o_x, o_y) to the data a parent
reports. Activation is Bernoulli(p_f) per sampling tick; the active interval
length follows the configured duration model.

Classes:
    FaultProcess: State of one link's fault generator.
    FaultSchedule: Per-tick record of link fault activity.

Functions:
    advance_fault: Advance a fault process by one tick.
    corrupt: Apply an active fault's offset to a measurement.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Literal, Tuple, Union

import numpy as np
import pandas as pd

from swarm_resilience.fault.channel import Measurement

logger = logging.getLogger(__name__)

SCHEDULE_COLUMNS = ["tick", "time", "robot", "parent", "active"]

# Remaining time below this fraction of dt counts as expired
_EXPIRY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FaultProcess:
    """
    Offset fault generator of one link.

    Attributes:
        p_f: Activation probability per tick.
        offset: (o_x, o_y) in meters.
        duration_model: "geometric" (memoryless) or "fixed".
        mean_duration_ticks: Mean or exact active length in ticks.
        active: Whether the fault is active during the current tick.
        remaining: Seconds of activity left, including the current tick.
    """

    p_f: float = 0.0
    offset: Tuple[float, float] = (0.5, 0.5)
    duration_model: Literal["geometric", "fixed"] = "geometric"
    mean_duration_ticks: float = 3.0
    active: bool = False
    remaining: float = 0.0

    def __post_init__(self):
        if not 0 <= self.p_f <= 1:
            raise ValueError(f"p_f must lie in [0, 1], got {self.p_f}")
        if not all(np.isfinite(self.offset)):
            raise ValueError("fault offsets must be finite")
        if self.active and self.remaining <= 0:
            raise ValueError("an active fault needs remaining time")

    def draw_ticks(self, rng: np.random.Generator) -> int:
        if self.duration_model == "fixed":
            return max(1, int(round(self.mean_duration_ticks)))
        return int(rng.geometric(1.0 / self.mean_duration_ticks))

    def with_probability(self, p_f: float) -> "FaultProcess":
        return self if p_f == self.p_f else replace(self, p_f=p_f)


def advance_fault(fp: FaultProcess, dt: float, rng: np.random.Generator) -> FaultProcess:
    """
    Advance a fault process by one sampling tick.

    An active fault first consumes dt of its remaining time. A process that is
    (or just became) inactive activates with probability p_f and draws a new
    duration, so the returned state tells whether the fault is active during
    this tick.

    Raises:
        ValueError: If dt <= 0.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if fp.active:
        remaining = fp.remaining - dt
        if remaining > _EXPIRY_TOLERANCE * dt:
            return replace(fp, remaining=remaining)
    if rng.random() < fp.p_f:
        return replace(fp, active=True, remaining=fp.draw_ticks(rng) * dt)
    if fp.active or fp.remaining:
        return replace(fp, active=False, remaining=0.0)
    return fp


def corrupt(q: Measurement, fp: FaultProcess) -> Measurement:
    """Add the offset to the x and y components while the fault is active."""
    if not fp.active:
        return q
    delta = np.zeros_like(q.value)
    delta[:2] = fp.offset
    return q.shifted(delta)


@dataclass
class FaultSchedule:
    """Ground-truth fault activity per (tick, robot, parent)."""

    rows: List[Tuple[int, float, int, int, bool]] = field(default_factory=list)

    def record(self, tick: int, time: float, robot: int, parent: int, active: bool) -> None:
        self.rows.append((tick, time, robot, parent, bool(active)))

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=SCHEDULE_COLUMNS)

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_dataframe().to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
        logger.debug(f"Wrote fault schedule with {len(self.rows)} rows to {path}")
        return path
