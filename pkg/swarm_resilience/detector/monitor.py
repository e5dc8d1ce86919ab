# swarm_resilience/detector/monitor.py

"""
Per-parent fault detection and routing state machine.

Every (robot, parent) link gets its own ParentMonitor. Each tick the
monitor compares the primary window against every backup path window,
pools the LLRs with a baseline of recent unflagged ticks, and decides
whether to route the parent's data over a backup path. A lock-in timer
debounces switches.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Deque, Dict, List, Optional, Union

import pandas as pd

from swarm_resilience.detector.statistics import llr_from_statistics, summarize, summarize_reference
from swarm_resilience.detector.thresholds import detection_threshold, pooled_median, recovery_threshold
from swarm_resilience.fault.channel import Measurement
from swarm_resilience.models.scenario_config import DetectorParams

logger = logging.getLogger(__name__)

DECISION_COLUMNS = [
    "tick",
    "robot",
    "parent",
    "llrs",
    "lambda",
    "lambda_recover",
    "fault_flag",
    "route",
    "t_lock",
]


@dataclass
class ParentMonitor:
    """
    Detection state of one (robot, parent) link.

    Attributes:
        robot: Monitoring robot.
        parent: Monitored parent.
        n_paths: Backup paths available (index 0 is the minimum-cost path).
        primary_window: Last N primary samples.
        backup_windows: Backup path index -> last N samples.
        llr_set: Backup path index -> LLR of the current tick.
        history: LLR values of the most recent ticks that raised no fault flag.
        lam: Detection threshold of the last decision.
        lam_recover: Recovery threshold of the last decision.
        use_backup: Whether the parent's data is currently taken from a backup path.
        route: Backup path index in use, None for the primary path.
        t_lock: Seconds before the route may change again.
        no_coverage: Set when the robot has no backup path.
        fault_flag: Whether the last decision saw a majority of paths above lam.
        switches: Number of route changes so far.
    """

    robot: int
    parent: int
    n_paths: int
    window: int = 20
    primary_window: Deque[Measurement] = field(default_factory=deque)
    backup_windows: Dict[int, Deque[Measurement]] = field(default_factory=dict)
    llr_set: Dict[int, float] = field(default_factory=dict)
    history: Deque[float] = field(default_factory=deque)
    lam: Optional[float] = None
    lam_recover: Optional[float] = None
    use_backup: bool = False
    route: Optional[int] = None
    t_lock: float = 0.0
    no_coverage: bool = False
    fault_flag: bool = False
    switches: int = 0

    @classmethod
    def create(cls, robot: int, parent: int, n_paths: int, params: DetectorParams) -> "ParentMonitor":
        return cls(
            robot=robot,
            parent=parent,
            n_paths=n_paths,
            window=params.window,
            primary_window=deque(maxlen=params.window),
            backup_windows={b: deque(maxlen=params.window) for b in range(n_paths)},
            history=deque(maxlen=params.history_length * max(1, n_paths)),
            no_coverage=n_paths == 0,
        )

    @property
    def ready(self) -> bool:
        """Windows are full, so LLRs can be evaluated."""
        return (
            self.n_paths > 0
            and len(self.primary_window) >= self.window
            and all(len(w) >= self.window for w in self.backup_windows.values())
        )

    def push_primary(self, measurement: Measurement) -> None:
        self.primary_window.append(measurement)

    def push_backup(self, b: int, measurement: Measurement) -> None:
        self.backup_windows[b].append(measurement)

    def update_llrs(self, params: DetectorParams) -> Dict[int, float]:
        """Recompute the LLR of every backup path from the current windows."""
        if not self.ready:
            self.llr_set = {}
            return self.llr_set
        primary = summarize(self.primary_window, params.eps_cov)
        self.llr_set = {
            b: llr_from_statistics(primary, summarize_reference(w, params.eps_cov), params.det_floor)
            for b, w in self.backup_windows.items()
        }
        return self.llr_set

    def route_label(self) -> str:
        return "primary" if self.route is None else f"backup:{self.route}"

    def log_row(self, tick: int) -> dict:
        return {
            "tick": tick,
            "robot": self.robot,
            "parent": self.parent,
            "llrs": ";".join(f"{b}:{v:.6f}" for b, v in sorted(self.llr_set.items())),
            "lambda": self.lam,
            "lambda_recover": self.lam_recover,
            "fault_flag": self.fault_flag,
            "route": self.route_label(),
            "t_lock": self.t_lock,
        }


def decide(monitor: ParentMonitor, params: DetectorParams) -> ParentMonitor:
    """
    Run one tick of the routing state machine on monitor (mutated in place).

    A fault is declared when at least Gamma backup paths have LLR > lambda;
    with the lock released the route switches to the minimum-cost path if it
    is flagged, else to the flagged path with the largest LLR. While on a
    backup path, the route reverts once no fault is flagged, the median of
    the current LLRs drops below the recovery threshold and the lock is
    released. Both thresholds come from the current LLRs pooled with the
    history. Only ticks without a fault flag feed the history. The lock
    timer counts down by dt every tick.

    Returns:
        The same monitor, for chaining.
    """
    if monitor.n_paths == 0:
        monitor.no_coverage = True
        return monitor
    if not monitor.llr_set:
        monitor.fault_flag = False
        monitor.t_lock = max(0.0, monitor.t_lock - params.dt)
        return monitor

    current = [monitor.llr_set[b] for b in sorted(monitor.llr_set)]
    pool = list(monitor.history) + current
    monitor.lam = detection_threshold(pool)
    monitor.lam_recover = recovery_threshold(pool, params.theta)
    median = pooled_median(current)

    flagged = [b for b in sorted(monitor.llr_set) if monitor.llr_set[b] > monitor.lam]
    monitor.fault_flag = len(flagged) >= params.majority(monitor.n_paths)

    if monitor.fault_flag and monitor.t_lock <= 0:
        if 0 in flagged:
            choice = 0
        else:
            choice = max(flagged, key=lambda b: (monitor.llr_set[b], -b))
        if monitor.route != choice:
            monitor.switches += 1
            logger.debug(
                f"Robot {monitor.robot}: fault on parent {monitor.parent}, routing over backup {choice}"
            )
        monitor.use_backup = True
        monitor.route = choice
        monitor.t_lock = params.t_dur
    elif monitor.use_backup and median < monitor.lam_recover and monitor.t_lock <= 0:
        logger.debug(f"Robot {monitor.robot}: parent {monitor.parent} recovered, back to primary")
        monitor.use_backup = False
        monitor.route = None
        monitor.t_lock = params.t_dur
        monitor.switches += 1

    monitor.t_lock = max(0.0, monitor.t_lock - params.dt)
    if not monitor.fault_flag:
        monitor.history.extend(current)
    return monitor


@dataclass
class DecisionLog:
    """Per-tick monitor snapshots."""

    rows: List[dict] = field(default_factory=list)

    def record(self, tick: int, monitor: ParentMonitor) -> None:
        self.rows.append(monitor.log_row(tick))

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=DECISION_COLUMNS)

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_dataframe().to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
        return path
