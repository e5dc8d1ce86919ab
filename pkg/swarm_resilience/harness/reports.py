# swarm_resilience/harness/reports.py

"""
CSV and JSON artifacts of trials and sweeps.

All tables are written through pandas with a fixed column order, six
decimals, and "\n" line endings so that identical results give identical
bytes. Empty results still produce header-only CSVs.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from swarm_resilience.abmc.paths import MultiplexLayer, write_backup_layer_csv
from swarm_resilience.models.metrics import AggregateResult, TrialMetrics

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = [
    "cell",
    "trial",
    "seed",
    "status",
    "accuracy",
    "false_positive_rate",
    "final_fraction",
    "final_mean_error",
    "mean_backup_hops",
    "first_detection_time",
    "centralized_accuracy",
    "centralized_false_positive_rate",
    "error",
]
DETECTION_METRICS = [
    "accuracy",
    "false_positive_rate",
    "final_fraction",
    "final_mean_error",
    "mean_backup_hops",
    "centralized_accuracy",
    "centralized_false_positive_rate",
]
HOP_STAT_COLUMNS = ["primary_hops", "count", "backup_hops_mean", "backup_hops_std", "within_one_hop"]
TRACKING_COLUMNS = ["tick", "time", "mean_error_mean", "mean_error_std", "fraction_mean", "fraction_std"]


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    try:
        frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write report {path}: {e}") from e
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def _write_json(data: Dict[str, Any], path: Path) -> Path:
    try:
        path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write report {path}: {e}") from e
    return path


def _json_float(value: Optional[float]) -> Optional[float]:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value


def _prepare(outdir: Union[str, Path]) -> Path:
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"Cannot create output directory {outdir}: {e}") from e
    return outdir


def trials_frame(agg: AggregateResult) -> pd.DataFrame:
    axes = list(agg.axes)
    rows = [
        {
            **{column: getattr(r, column) for column in TRIAL_COLUMNS},
            **{axis: r.params.get(axis) for axis in axes},
        }
        for r in agg.records
    ]
    return pd.DataFrame(rows, columns=["cell"] + axes + TRIAL_COLUMNS[1:])


def detection_frame(agg: AggregateResult) -> pd.DataFrame:
    """One row per cell: mean and std of every detection and formation metric."""
    axes = list(agg.axes)
    columns = ["cell"] + axes + ["trials", "failed"]
    for metric in DETECTION_METRICS:
        columns += [f"{metric}_mean", f"{metric}_std"]
    rows = []
    for cell in agg.cells:
        row = {"cell": cell.cell, "trials": cell.trials, "failed": cell.failed}
        row.update({axis: cell.params.get(axis) for axis in axes})
        for metric in DETECTION_METRICS:
            row[f"{metric}_mean"] = cell.mean(metric)
            row[f"{metric}_std"] = cell.std(metric)
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def backup_hops_frame(agg: AggregateResult) -> pd.DataFrame:
    axes = list(agg.axes)
    rows = []
    for cell in agg.cells:
        for primary, (count, mean, std, within_one) in sorted(cell.hop_stats.items()):
            row = {"cell": cell.cell, **{axis: cell.params.get(axis) for axis in axes}}
            row.update(
                primary_hops=primary,
                count=count,
                backup_hops_mean=mean,
                backup_hops_std=std,
                within_one_hop=within_one,
            )
            rows.append(row)
    return pd.DataFrame(rows, columns=["cell"] + axes + HOP_STAT_COLUMNS)


def tracking_frame(agg: AggregateResult) -> pd.DataFrame:
    axes = list(agg.axes)
    frames = []
    for cell in agg.cells:
        if not len(cell.times):
            continue
        frame = pd.DataFrame(
            {
                "tick": range(len(cell.times)),
                "time": cell.times,
                "mean_error_mean": cell.mean_error[0],
                "mean_error_std": cell.mean_error[1],
                "fraction_mean": cell.fraction[0],
                "fraction_std": cell.fraction[1],
            }
        )
        frame.insert(0, "cell", cell.cell)
        for offset, axis in enumerate(axes, start=1):
            frame.insert(offset, axis, [cell.params.get(axis)] * len(frame))
        frames.append(frame)
    columns = ["cell"] + axes + TRACKING_COLUMNS
    if not frames:
        return pd.DataFrame(columns=columns)
    return pd.concat(frames, ignore_index=True)[columns]


def emit_reports(agg: AggregateResult, outdir: Union[str, Path]) -> List[Path]:
    """
    Write the sweep artifacts.

    Files: trials.csv (one row per trial), detection.csv (one row per cell),
    backup_hops.csv (hop-count statistics per primary hop count),
    tracking.csv (per-tick error and formation fraction) and summary.json.

    Raises:
        OSError: If a file cannot be written; the message names the path.
    """
    outdir = _prepare(outdir)
    written = [
        _write_frame(trials_frame(agg), outdir / "trials.csv"),
        _write_frame(detection_frame(agg), outdir / "detection.csv"),
        _write_frame(backup_hops_frame(agg), outdir / "backup_hops.csv"),
        _write_frame(tracking_frame(agg), outdir / "tracking.csv"),
    ]
    summary = {
        "name": agg.name,
        "axes": list(agg.axes),
        "cells": agg.cell_count,
        "trials": len(agg.records),
        "failed_trials": agg.failed_trials,
        "runtime_s": agg.runtime_s,
        "trial_runtime_s": sum(r.runtime_s for r in agg.records),
        "cell_summaries": [
            {
                "cell": cell.cell,
                "params": cell.params,
                "trials": cell.trials,
                "failed": cell.failed,
                "accuracy_mean": _json_float(cell.mean("accuracy")),
                "false_positive_rate_mean": _json_float(cell.mean("false_positive_rate")),
                "final_fraction_mean": _json_float(cell.mean("final_fraction")),
            }
            for cell in agg.cells
        ],
    }
    written.append(_write_json(summary, outdir / "summary.json"))
    logger.info(f"[Reports] wrote {len(written)} files to {outdir}")
    return written


def emit_trial_reports(
    metrics: TrialMetrics, outdir: Union[str, Path], layer: Optional[MultiplexLayer] = None
) -> List[Path]:
    """
    Write single-trial artifacts: metrics.csv (tick series), robots.csv,
    backup_hops.csv, decisions.csv and faults.csv when logs were recorded,
    backup_layer.csv when a layer is given or was kept with the logs, and
    summary.json.
    """
    outdir = _prepare(outdir)
    layer = layer if layer is not None else metrics.backup_layer
    written = [
        _write_frame(metrics.series_frame(), outdir / "metrics.csv"),
        _write_frame(metrics.robot_frame(), outdir / "robots.csv"),
        _write_frame(metrics.hop_frame(), outdir / "backup_hops.csv"),
    ]
    if metrics.decisions is not None:
        written.append(_write_frame(metrics.decisions, outdir / "decisions.csv"))
    if metrics.faults is not None:
        written.append(_write_frame(metrics.faults, outdir / "faults.csv"))
    if layer is not None:
        written.append(write_backup_layer_csv(layer, outdir / "backup_layer.csv"))
    written.append(_write_json(metrics.summary(), outdir / "summary.json"))
    logger.info(f"[Reports] wrote {len(written)} files to {outdir}")
    return written
