# swarm_resilience/sim/trial.py

"""
One simulated trial: graph, backup layer, faults, detection and formation control.

Every tick is a two-phase barrier. First all measurements are generated from
the current positions, pushed through the fault and channel models, and the
monitors decide; then every position is updated from the delivered data.

Random streams are independent per purpose and per edge, so toggling
mitigation leaves the fault and noise realizations unchanged (paired runs).

Detection is scored per faulty link from the end of warm-up on: a tick is
faulty while the link's primary window holds a corrupted sample, and the
verdict is the monitor's fault flag for that tick.
"""

import logging
import time
from collections import deque
from dataclasses import replace
from typing import Deque, Dict, List, Optional, Tuple

import numpy as np

from swarm_resilience.abmc.paths import MultiplexLayer, build_backup_layer
from swarm_resilience.detector.monitor import DecisionLog, ParentMonitor, decide
from swarm_resilience.detector.scoring import score
from swarm_resilience.errors import ConfigError
from swarm_resilience.fault.channel import ChannelModel, Measurement, apply_channel
from swarm_resilience.fault.process import FaultProcess, FaultSchedule, advance_fault, corrupt
from swarm_resilience.graph.construction import build_random_hhc
from swarm_resilience.graph.reconfigure import remove_and_reconfigure
from swarm_resilience.models.graph import Edge, HierGraph
from swarm_resilience.models.metrics import TrialMetrics
from swarm_resilience.models.scenario_config import ScenarioConfig
from swarm_resilience.sim.dynamics import control_step, tracking_errors
from swarm_resilience.sim.routing import MeasurementBus, route_measurement

logger = logging.getLogger(__name__)

# Stream tags mixed into the trial seed
FAULT_STREAM = 1
PRIMARY_STREAM = 2
BACKUP_STREAM = 3


def build_scenario_graphs(cfg: ScenarioConfig) -> Tuple[HierGraph, HierGraph]:
    """
    Initial graph and the graph the trial runs on.

    They differ only when robots fail at start: the second graph is the
    reconfigured epoch whose positions are the new role targets.
    """
    meta = cfg.graph
    initial = build_random_hhc(
        cfg.n,
        max_leader_children=meta.max_leader_children,
        max_follower_children=meta.max_follower_children,
        rng=np.random.default_rng(cfg.seed),
        comm_range=meta.comm_range,
        min_separation=meta.min_separation,
        d=cfg.d,
        max_attempts=meta.max_attempts,
    )
    if not cfg.failed_robots:
        return initial, initial
    return initial, remove_and_reconfigure(initial, cfg.failed_robots, at_time=0.0)


def fault_links(cfg: ScenarioConfig, g: HierGraph, layer: Optional[MultiplexLayer] = None) -> List[Edge]:
    """
    Links carrying a fault process.

    Each targeted follower gets faults on its first faulty_parents parents;
    links from the leader are never faulty. Without an explicit robot list
    every follower is targeted, or only those the backup layer covers when
    one is given.

    Raises:
        ConfigError: If a targeted robot is not a standard follower of g.
    """
    meta = cfg.fault
    followers = g.followers()
    if meta.robots is None:
        targets = [i for i in followers if layer is None or layer.covers(i)]
    else:
        unknown = sorted(set(meta.robots) - set(followers))
        if unknown:
            raise ConfigError(f"fault.robots: {unknown} are not standard followers of the graph")
        targets = sorted(set(meta.robots))
    links = []
    for i in targets:
        eligible = [j for j in g.parents[i] if j != g.leader]
        links.extend((i, j) for j in eligible[: meta.faulty_parents])
    return links


def _create_monitors(cfg: ScenarioConfig, g: HierGraph, layer: MultiplexLayer) -> Dict[Edge, ParentMonitor]:
    params = cfg.detector_params()
    monitors = {}
    for i in g.followers():
        n_paths = len(layer.paths[i]) if layer.covers(i) else 0
        for j in g.parents[i]:
            monitors[(i, j)] = ParentMonitor.create(i, j, n_paths, params)
    return monitors


def breakdown_accounting(metrics: TrialMetrics, threshold: float) -> TrialMetrics:
    """
    Flag robots whose cumulative tracking error exceeds threshold.

    A flagged robot stays irrecoverable for the rest of the run, so the
    maintained-formation fraction never increases.

    Raises:
        ValueError: If threshold <= 0.
    """
    if threshold <= 0:
        raise ValueError(f"breakdown threshold must be positive, got {threshold}")
    n_ticks = metrics.ticks
    crossed = metrics.cumulative_errors > threshold
    broken_tick = np.full(len(metrics.robots), n_ticks)
    broken: Dict[int, bool] = {}
    broken_at: Dict[int, Optional[float]] = {}
    for col, robot in enumerate(metrics.robots):
        hits = np.flatnonzero(crossed[:, col])
        if hits.size:
            broken_tick[col] = hits[0]
            broken[robot] = True
            broken_at[robot] = float(metrics.times[hits[0]])
        else:
            broken[robot] = False
            broken_at[robot] = None
    counts = (broken_tick[None, :] <= np.arange(n_ticks)[:, None]).sum(axis=1)
    fraction = 1.0 - counts / max(1, len(metrics.robots))
    return replace(metrics, broken=broken, broken_at=broken_at, fraction=fraction)


def run_trial(cfg: ScenarioConfig, record_logs: bool = True) -> TrialMetrics:
    """
    Simulate one trial.

    Args:
        cfg: Validated scenario.
        record_logs: Keep per-tick decision and fault logs in the result.

    Returns:
        TrialMetrics after breakdown accounting.

    Raises:
        ConfigError: If the scenario does not fit the generated graph.
    """
    started = time.perf_counter()
    dt = cfg.dt
    params = cfg.detector_params()
    channel = ChannelModel.from_meta(cfg.channel)
    warmup = params.warmup_ticks
    velocity = cfg.leader_velocity()

    logger.info(f"[Trial] Step 1: building a {cfg.n}-robot graph (seed {cfg.seed})")
    initial, g = build_scenario_graphs(cfg)
    logger.info(f"[Trial] Step 2: building the backup layer on epoch {g.epoch.index}")
    layer = build_backup_layer(g, cfg.abmc)

    leader = g.leader
    robots = tuple(g.robots)
    targets = {i: g.position(i) for i in robots}
    positions = {i: initial.position(i).copy() for i in robots}
    control_edges = [(i, j) for i in robots if i != leader for j in g.parents[i]]
    monitors = _create_monitors(cfg, g, layer)

    faults: Dict[Edge, FaultProcess] = {
        (i, j): FaultProcess(
            p_f=cfg.fault.p_f,
            offset=cfg.fault.offset_for(i),
            duration_model=cfg.fault.duration_model,
            mean_duration_ticks=cfg.fault.mean_duration_ticks,
        )
        for i, j in fault_links(cfg, g, layer)
    }
    fault_rngs = {e: np.random.default_rng([cfg.seed, FAULT_STREAM, *e]) for e in faults}
    primary_rngs = {e: np.random.default_rng([cfg.seed, PRIMARY_STREAM, *e]) for e in control_edges}
    backup_rngs = {
        (e, b): np.random.default_rng([cfg.seed, BACKUP_STREAM, *e, b])
        for e, monitor in monitors.items()
        for b in range(monitor.n_paths)
    }

    n_ticks = cfg.ticks
    errors = np.zeros((n_ticks, len(robots)))
    cumulative = np.zeros((n_ticks, len(robots)))
    leader_path = np.zeros((n_ticks, cfg.d))
    verdicts: Dict[Edge, List[bool]] = {e: [] for e in faults}
    truth: Dict[Edge, List[bool]] = {e: [] for e in faults}
    # Fault flags of the samples currently in each primary window
    in_window: Dict[Edge, Deque[bool]] = {e: deque(maxlen=params.window) for e in faults}
    decision_log = DecisionLog() if record_logs else None
    schedule = FaultSchedule() if record_logs else None
    first_detection: Optional[float] = None

    logger.info(f"[Trial] Step 3: simulating {n_ticks} ticks, {len(faults)} faulty links")
    for tick in range(n_ticks):
        t = tick * dt
        bus = MeasurementBus(tick)

        for edge in control_edges:
            i, j = edge
            q = Measurement(positions[j] - positions[i], timestamp=t)
            fp = faults.get(edge)
            if fp is not None:
                if tick >= warmup:
                    fp = advance_fault(fp.with_probability(cfg.p_f_at(t)), dt, fault_rngs[edge])
                    faults[edge] = fp
                in_window[edge].append(fp.active)
                if schedule is not None:
                    schedule.record(tick, t, i, j, fp.active)
                bus.primary[edge] = apply_channel(corrupt(q, fp), channel, 1, primary_rngs[edge])
            else:
                bus.primary[edge] = apply_channel(q, channel, 1, primary_rngs[edge])

            monitor = monitors.get(edge)
            if monitor is None:
                continue
            monitor.push_primary(bus.primary[edge])
            if monitor.n_paths:
                for b, path in enumerate(layer.paths[i].paths):
                    sent = Measurement(q.value, timestamp=t, source=f"backup:{b}")
                    bus.backup[(edge, b)] = apply_channel(sent, channel, path.hops, backup_rngs[(edge, b)])
                    monitor.push_backup(b, bus.backup[(edge, b)])
            monitor.update_llrs(params)
            decide(monitor, params)
            if decision_log is not None:
                decision_log.record(tick, monitor)

            if fp is not None and tick >= warmup:
                verdicts[edge].append(monitor.fault_flag)
                truth[edge].append(any(in_window[edge]))
                if first_detection is None and fp.active and monitor.fault_flag:
                    first_detection = t
                    logger.info(f"[Trial] first detection at t={t:.2f}s on link {edge}")

        updated = {leader: positions[leader] + dt * velocity}
        for i in robots:
            if i == leader:
                continue
            ps = g.parents[i]
            received = [
                route_measurement(g, layer, monitors, (i, j), tick, bus, cfg.mitigation_enabled).value
                for j in ps
            ]
            offsets = [targets[j] - targets[i] for j in ps]
            updated[i] = control_step(positions[i], received, offsets, cfg.control_gain, dt, feedforward=velocity)
        positions = updated
        leader_path[tick] = positions[leader]

        current = tracking_errors(positions, targets, leader)
        errors[tick] = [current[i] for i in robots]
        excess = np.maximum(0.0, errors[tick] - cfg.error_deadband) * dt
        cumulative[tick] = excess if tick == 0 else cumulative[tick - 1] + excess

    followers_mask = np.array([i != leader for i in robots])
    mean_error = errors[:, followers_mask].mean(axis=1) if followers_mask.any() else np.zeros(n_ticks)
    detection = score(verdicts, truth)
    primary_hops = g.primary_hops()
    hop_pairs = tuple(
        (i, primary_hops[i], layer.paths[i].min_path.hops) for i in sorted(layer.paths)
    )

    metrics = TrialMetrics(
        times=(np.arange(n_ticks) + 1) * dt,
        robots=robots,
        errors=errors,
        cumulative_errors=cumulative,
        mean_error=mean_error,
        fraction=np.ones(n_ticks),
        broken={},
        broken_at={},
        accuracy=detection.accuracy,
        false_positive_rate=detection.false_positive_rate,
        fault_ticks=detection.fault_ticks,
        clean_ticks=detection.clean_ticks,
        hop_histogram=layer.hop_histogram(),
        hop_pairs=hop_pairs,
        first_detection_time=first_detection,
        leader_path=leader_path,
        seed=cfg.seed,
        mitigation_enabled=cfg.mitigation_enabled,
        decisions=decision_log.to_dataframe() if decision_log is not None else None,
        faults=schedule.to_dataframe() if schedule is not None else None,
        backup_layer=layer if record_logs else None,
    )
    metrics = breakdown_accounting(metrics, cfg.breakdown_threshold)
    metrics = replace(metrics, runtime_s=time.perf_counter() - started)
    logger.info(
        f"[Trial] Step 4: done, accuracy {metrics.accuracy:.3f}, FPR {metrics.false_positive_rate:.3f}, "
        f"final fraction {metrics.final_fraction:.3f}"
    )
    return metrics
