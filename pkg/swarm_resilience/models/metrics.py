# swarm_resilience/models/metrics.py

"""
Result records of trials and sweeps.

Classes:
    TrialMetrics: Everything a single simulated trial measured.
    TrialRecord: Flat per-trial row of a sweep (picklable, no arrays of logs).
    CellAggregate: Mean and standard deviation of one sweep cell.
    AggregateResult: All cells and trial records of a sweep.
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

if TYPE_CHECKING:
    from swarm_resilience.abmc.paths import MultiplexLayer

SERIES_COLUMNS = ["tick", "time", "mean_error", "fraction"]
ROBOT_COLUMNS = ["tick", "time", "robot", "error", "cumulative_error"]
HOP_COLUMNS = ["robot", "primary_hops", "backup_hops"]


@dataclass(frozen=True, eq=False)
class TrialMetrics:
    """
    Measurements of one trial.

    Attributes:
        times: Time stamp of every tick (s).
        robots: Robot ids, column order of the error matrices.
        errors: Instantaneous tracking error, ticks x robots (m).
        cumulative_errors: Accumulated error above the deadband, ticks x robots.
        mean_error: Per-tick mean tracking error over non-leader robots.
        fraction: Per-tick fraction of robots still maintaining formation.
        broken: Robot -> irrecoverable flag at the end of the run.
        broken_at: Robot -> time it became irrecoverable (None if never).
        accuracy: Detection accuracy over fault-carrying links.
        false_positive_rate: Detection FPR over fault-carrying links.
        fault_ticks: Scored ticks whose primary window held a corrupted sample.
        clean_ticks: Scored ticks with a clean primary window.
        hop_histogram: Minimum backup hop count -> followers.
        hop_pairs: (robot, primary hops, minimum backup hops) per covered follower.
        first_detection_time: First time a faulty link was flagged (None if never).
        seed: Trial seed.
        mitigation_enabled: Whether routing followed the detector.
        runtime_s: Wall-clock runtime.
        leader_path: Leader position after every tick, ticks x d (m).
        decisions: Per-tick monitor decisions, when logs were recorded.
        faults: Per-tick fault activity, when logs were recorded.
        backup_layer: Backup layer the trial ran on, when logs were recorded.
    """

    times: np.ndarray
    robots: Tuple[int, ...]
    errors: np.ndarray
    cumulative_errors: np.ndarray
    mean_error: np.ndarray
    fraction: np.ndarray
    broken: Dict[int, bool]
    broken_at: Dict[int, Optional[float]]
    accuracy: float = 1.0
    false_positive_rate: float = 0.0
    fault_ticks: int = 0
    clean_ticks: int = 0
    hop_histogram: Dict[int, int] = field(default_factory=dict)
    hop_pairs: Tuple[Tuple[int, int, int], ...] = ()
    first_detection_time: Optional[float] = None
    seed: int = 0
    mitigation_enabled: bool = True
    runtime_s: float = 0.0
    leader_path: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)), repr=False)
    decisions: Optional[pd.DataFrame] = field(default=None, repr=False)
    faults: Optional[pd.DataFrame] = field(default=None, repr=False)
    backup_layer: Optional["MultiplexLayer"] = field(default=None, repr=False)

    @property
    def ticks(self) -> int:
        return len(self.times)

    @property
    def final_fraction(self) -> float:
        return float(self.fraction[-1]) if len(self.fraction) else 1.0

    @property
    def final_mean_error(self) -> float:
        return float(self.mean_error[-1]) if len(self.mean_error) else 0.0

    def robot_error(self, robot: int) -> np.ndarray:
        return self.errors[:, self.robots.index(robot)]

    def mean_backup_hops(self) -> float:
        if not self.hop_pairs:
            return float("nan")
        return float(np.mean([pair[2] for pair in self.hop_pairs]))

    def series_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "tick": np.arange(self.ticks),
                "time": self.times,
                "mean_error": self.mean_error,
                "fraction": self.fraction,
            },
            columns=SERIES_COLUMNS,
        )

    def robot_frame(self) -> pd.DataFrame:
        n_ticks, n_robots = self.errors.shape
        return pd.DataFrame(
            {
                "tick": np.repeat(np.arange(n_ticks), n_robots),
                "time": np.repeat(self.times, n_robots),
                "robot": np.tile(np.asarray(self.robots), n_ticks),
                "error": self.errors.reshape(-1),
                "cumulative_error": self.cumulative_errors.reshape(-1),
            },
            columns=ROBOT_COLUMNS,
        )

    def hop_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.hop_pairs), columns=HOP_COLUMNS)

    def summary(self) -> Dict[str, Any]:
        """JSON-ready summary of the trial."""
        return {
            "seed": self.seed,
            "mitigation_enabled": self.mitigation_enabled,
            "ticks": self.ticks,
            "accuracy": self.accuracy,
            "false_positive_rate": self.false_positive_rate,
            "fault_ticks": self.fault_ticks,
            "clean_ticks": self.clean_ticks,
            "final_fraction": self.final_fraction,
            "final_mean_error": self.final_mean_error,
            "first_detection_time": self.first_detection_time,
            "broken_robots": sorted(i for i, flag in self.broken.items() if flag),
            "hop_histogram": {str(k): v for k, v in sorted(self.hop_histogram.items())},
            "runtime_s": self.runtime_s,
        }


@dataclass(frozen=True)
class TrialRecord:
    """
    One sweep trial.

    Attributes:
        cell: Cell index in grid order.
        params: Swept parameter path -> value of the cell.
        trial: Trial index within the cell.
        seed: Derived trial seed.
        status: "ok" or "failed".
        error: Failure message of a failed trial.
        mean_error: Per-tick mean tracking error series.
        fraction: Per-tick formation fraction series.
        hop_pairs: (primary hops, minimum backup hops) per covered follower.
        runtime_s: Wall-clock runtime of the trial.
    """

    cell: int
    params: Dict[str, Any]
    trial: int
    seed: int
    status: str = "ok"
    error: str = ""
    accuracy: float = float("nan")
    false_positive_rate: float = float("nan")
    final_fraction: float = float("nan")
    final_mean_error: float = float("nan")
    mean_backup_hops: float = float("nan")
    first_detection_time: Optional[float] = None
    centralized_accuracy: Optional[float] = None
    centralized_false_positive_rate: Optional[float] = None
    times: Tuple[float, ...] = ()
    mean_error: Tuple[float, ...] = ()
    fraction: Tuple[float, ...] = ()
    hop_pairs: Tuple[Tuple[int, int], ...] = ()
    runtime_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @classmethod
    def from_metrics(
        cls, cell: int, params: Dict[str, Any], trial: int, seed: int, metrics: TrialMetrics, **extra
    ) -> "TrialRecord":
        return cls(
            cell=cell,
            params=dict(params),
            trial=trial,
            seed=seed,
            accuracy=metrics.accuracy,
            false_positive_rate=metrics.false_positive_rate,
            final_fraction=metrics.final_fraction,
            final_mean_error=metrics.final_mean_error,
            mean_backup_hops=metrics.mean_backup_hops(),
            first_detection_time=metrics.first_detection_time,
            times=tuple(float(t) for t in metrics.times),
            mean_error=tuple(float(e) for e in metrics.mean_error),
            fraction=tuple(float(f) for f in metrics.fraction),
            hop_pairs=tuple((int(p), int(b)) for _, p, b in metrics.hop_pairs),
            runtime_s=metrics.runtime_s,
            **extra,
        )

    @classmethod
    def failed(cls, cell: int, params: Dict[str, Any], trial: int, seed: int, error: str) -> "TrialRecord":
        return cls(cell=cell, params=dict(params), trial=trial, seed=seed, status="failed", error=error)


@dataclass(frozen=True, eq=False)
class CellAggregate:
    """
    Mean and population standard deviation over the successful trials of a cell.

    Attributes:
        cell: Cell index.
        params: Swept parameter path -> value.
        trials: Trials run.
        failed: Trials that raised.
        stats: Metric name -> (mean, std) over successful trials.
        hop_stats: Primary hops -> (count, mean backup hops, std, share within one extra hop).
        times: Tick time stamps of the series.
        mean_error: (mean, std) of the mean tracking error per tick.
        fraction: (mean, std) of the formation fraction per tick.
    """

    cell: int
    params: Dict[str, Any]
    trials: int
    failed: int
    stats: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    hop_stats: Dict[int, Tuple[int, float, float, float]] = field(default_factory=dict)
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean_error: Tuple[np.ndarray, np.ndarray] = field(default_factory=lambda: (np.zeros(0), np.zeros(0)))
    fraction: Tuple[np.ndarray, np.ndarray] = field(default_factory=lambda: (np.zeros(0), np.zeros(0)))

    def mean(self, metric: str) -> float:
        return self.stats.get(metric, (float("nan"), float("nan")))[0]

    def std(self, metric: str) -> float:
        return self.stats.get(metric, (float("nan"), float("nan")))[1]


@dataclass(frozen=True, eq=False)
class AggregateResult:
    """
    Outcome of a sweep.

    Attributes:
        name: Sweep name.
        axes: Swept parameter paths in grid order.
        cells: Per-cell aggregates in grid order.
        records: Every trial record, ordered by (cell, trial).
        runtime_s: Wall-clock runtime of the whole sweep.
    """

    name: Optional[str]
    axes: Tuple[str, ...]
    cells: List[CellAggregate] = field(default_factory=list)
    records: List[TrialRecord] = field(default_factory=list)
    runtime_s: float = 0.0

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @property
    def failed_trials(self) -> int:
        return sum(1 for r in self.records if not r.ok)

    def cell(self, **params) -> CellAggregate:
        """Look up a cell by its swept values, keyed by path with dots as '__'."""
        wanted = {key.replace("__", "."): value for key, value in params.items()}
        for cell in self.cells:
            if all(cell.params.get(k) == v for k, v in wanted.items()):
                return cell
        raise KeyError(f"No cell with {wanted}")
