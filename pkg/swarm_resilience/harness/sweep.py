# swarm_resilience/harness/sweep.py

"""
Configuration loading and seeded Monte Carlo sweeps.

A sweep expands its axes into a grid of cells, runs a fixed number of
trials per cell and reduces the trial records into per-cell aggregates.
Trial seeds come from a stable hash of the seed base, the cell's swept
values and the trial index, so results do not depend on parallelism.
"""

import hashlib
import itertools
import json
import logging
import time
from dataclasses import dataclass, replace
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from tqdm import tqdm

from swarm_resilience.detector.centralized import run_centralized_benchmark
from swarm_resilience.errors import ConfigError
from swarm_resilience.fault.channel import ChannelModel
from swarm_resilience.models.metrics import AggregateResult, CellAggregate, TrialRecord
from swarm_resilience.models.scenario_config import ScenarioConfig, SweepSpec
from swarm_resilience.sim.trial import run_trial

logger = logging.getLogger(__name__)

CENTRALIZED_STREAM = 4
AGGREGATE_METRICS = [
    "accuracy",
    "false_positive_rate",
    "final_fraction",
    "final_mean_error",
    "mean_backup_hops",
    "first_detection_time",
    "centralized_accuracy",
    "centralized_false_positive_rate",
]


def parse_config(path: Union[str, Path]) -> Union[ScenarioConfig, SweepSpec]:
    """
    Load a scenario or sweep configuration.

    A mapping with "axes" or "base" is a sweep, anything else a scenario.

    Raises:
        ConfigError: If the file is missing, is not YAML, or fails validation.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    model = SweepSpec if ("axes" in data or "base" in data) else ScenarioConfig
    try:
        return model.from_dict(data)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from e


def apply_overrides(base: ScenarioConfig, overrides: Dict[str, Any]) -> ScenarioConfig:
    """
    Copy of base with dotted-path overrides applied.

    Raises:
        ConfigError: If a path does not address a config field or the result is invalid.
    """
    data = base.model_dump(mode="json")
    for path, value in overrides.items():
        keys = path.split(".")
        node = data
        for key in keys[:-1]:
            if node.get(key) is None:
                node[key] = {}
            node = node[key]
            if not isinstance(node, dict):
                raise ConfigError(f"Sweep axis '{path}': '{key}' is not a section")
        node[keys[-1]] = value
    return ScenarioConfig.from_dict(data)


def expand_cells(spec: SweepSpec) -> List[Dict[str, Any]]:
    """Swept values of every cell; the last axis varies fastest."""
    paths = [axis.path for axis in spec.axes]
    return [dict(zip(paths, combo)) for combo in itertools.product(*(axis.values for axis in spec.axes))]


def cell_key(params: Dict[str, Any]) -> str:
    """Canonical text of a cell's swept values, independent of axis order."""
    return ",".join(f"{path}={json.dumps(params[path], sort_keys=True)}" for path in sorted(params))


def derive_seed(seed_base: int, key: str, trial: int) -> int:
    digest = hashlib.sha256(f"{seed_base}|{key}|{trial}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


@dataclass(frozen=True)
class SweepTask:
    cell: int
    params: Dict[str, Any]
    trial: int
    seed: int
    config: Dict[str, Any]
    centralized: bool = False
    centralized_ticks: int = 2000


def execute_task(task: SweepTask) -> TrialRecord:
    """Run one sweep trial; failures become failed records."""
    try:
        cfg = ScenarioConfig.from_dict(task.config)
        metrics = run_trial(cfg, record_logs=False)
        extra = {}
        if task.centralized:
            benchmark = run_centralized_benchmark(
                cfg.fault.p_f,
                ChannelModel.from_meta(cfg.channel),
                cfg.fault.offset,
                task.centralized_ticks,
                np.random.default_rng([task.seed, CENTRALIZED_STREAM]),
                eps_cov=cfg.detector.eps_cov,
            )
            extra = {
                "centralized_accuracy": benchmark.accuracy,
                "centralized_false_positive_rate": benchmark.false_positive_rate,
            }
        return TrialRecord.from_metrics(task.cell, task.params, task.trial, task.seed, metrics, **extra)
    except Exception as e:
        logger.exception(f"[Sweep] cell {task.cell} trial {task.trial} failed")
        return TrialRecord.failed(task.cell, task.params, task.trial, task.seed, f"{type(e).__name__}: {e}")


def build_tasks(spec: SweepSpec) -> List[SweepTask]:
    """
    Every (cell, trial) of the sweep with its validated configuration.

    Raises:
        ConfigError: If a cell's configuration is invalid.
    """
    tasks = []
    for index, params in enumerate(expand_cells(spec)):
        cell_cfg = apply_overrides(spec.base, params)
        key = cell_key(params)
        for trial in range(spec.trials):
            seed = derive_seed(spec.seed_base, key, trial)
            tasks.append(
                SweepTask(
                    cell=index,
                    params=params,
                    trial=trial,
                    seed=seed,
                    config=cell_cfg.model_copy(update={"seed": seed}).model_dump(mode="json"),
                    centralized=spec.centralized,
                    centralized_ticks=spec.centralized_ticks,
                )
            )
    return tasks


def _stats(frame: pd.DataFrame, column: str) -> Tuple[float, float]:
    values = pd.to_numeric(frame[column], errors="coerce").dropna()
    if values.empty:
        return float("nan"), float("nan")
    return float(values.mean()), float(values.std(ddof=0))


def _series_stats(series: Sequence[Tuple[float, ...]]) -> Tuple[np.ndarray, np.ndarray]:
    if not series:
        return np.zeros(0), np.zeros(0)
    stacked = np.asarray(series, dtype=float)
    return stacked.mean(axis=0), stacked.std(axis=0)


def _hop_stats(records: Sequence[TrialRecord]) -> Dict[int, Tuple[int, float, float, float]]:
    pairs = [pair for r in records for pair in r.hop_pairs]
    if not pairs:
        return {}
    frame = pd.DataFrame(pairs, columns=["primary_hops", "backup_hops"])
    frame["within_one"] = frame["backup_hops"] <= frame["primary_hops"] + 1
    stats = {}
    for primary, group in frame.groupby("primary_hops", sort=True):
        stats[int(primary)] = (
            int(len(group)),
            float(group["backup_hops"].mean()),
            float(group["backup_hops"].std(ddof=0)),
            float(group["within_one"].mean()),
        )
    return stats


def aggregate(spec: SweepSpec, records: Sequence[TrialRecord]) -> AggregateResult:
    """Reduce trial records into per-cell mean and population standard deviation."""
    records = sorted(records, key=lambda r: (r.cell, r.trial))
    cells = []
    for index, params in enumerate(expand_cells(spec)):
        cell_records = [r for r in records if r.cell == index]
        ok = [r for r in cell_records if r.ok]
        frame = pd.DataFrame(
            [{metric: getattr(r, metric) for metric in AGGREGATE_METRICS} for r in ok],
            columns=AGGREGATE_METRICS,
            dtype=float,
        )
        cells.append(
            CellAggregate(
                cell=index,
                params=params,
                trials=len(cell_records),
                failed=len(cell_records) - len(ok),
                stats={metric: _stats(frame, metric) for metric in AGGREGATE_METRICS},
                hop_stats=_hop_stats(ok),
                times=np.asarray(ok[0].times) if ok else np.zeros(0),
                mean_error=_series_stats([r.mean_error for r in ok]),
                fraction=_series_stats([r.fraction for r in ok]),
            )
        )
    return AggregateResult(
        name=spec.name,
        axes=tuple(axis.path for axis in spec.axes),
        cells=cells,
        records=list(records),
    )


def run_sweep(spec: SweepSpec, parallelism: int = 1, progress: bool = True) -> AggregateResult:
    """
    Run every trial of a sweep and aggregate per cell.

    Args:
        spec: Validated sweep.
        parallelism: Worker processes; 1 runs in-process.
        progress: Show a progress bar.

    Returns:
        AggregateResult, identical for any parallelism.

    Raises:
        ConfigError: If a cell's configuration is invalid (before any trial runs).
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be at least 1, got {parallelism}")
    started = time.perf_counter()
    tasks = build_tasks(spec)
    logger.info(
        f"[Sweep] Step 1: {spec.cell_count} cells x {spec.trials} trials = {len(tasks)} trials, "
        f"{parallelism} worker(s)"
    )
    bar = tqdm(total=len(tasks), desc=f"Sweep {spec.name or ''}".strip(), unit="trial", disable=not progress)
    records: List[TrialRecord] = []
    try:
        if parallelism == 1:
            for task in tasks:
                records.append(execute_task(task))
                bar.update(1)
        else:
            with Pool(processes=parallelism) as pool:
                for record in pool.imap(execute_task, tasks):
                    records.append(record)
                    bar.update(1)
    finally:
        bar.close()

    failed = sum(1 for r in records if not r.ok)
    if failed:
        logger.warning(f"[Sweep] {failed} of {len(records)} trials failed")
    logger.info("[Sweep] Step 2: aggregating")
    return replace(aggregate(spec, records), runtime_s=time.perf_counter() - started)
