"""
swarm_resilience

Resilient leader-follower swarms: backup-path consensus over hierarchical
graphs, likelihood-ratio detection of faulty relative-position data with
rerouting over backup paths, and a seeded simulation and sweep harness.
"""

from swarm_resilience.abmc import MultiplexLayer, bellman_oracle, build_backup_layer, run_to_convergence
from swarm_resilience.detector import ScoreResult, decide, detection_threshold, recovery_threshold, score
from swarm_resilience.errors import ConfigError, SwarmResilienceError
from swarm_resilience.fault import ChannelModel, FaultProcess, advance_fault, apply_channel
from swarm_resilience.graph import build_random_hhc, remove_and_reconfigure, validate_hhc
from swarm_resilience.harness import emit_reports, parse_config, run_sweep
from swarm_resilience.models import AbmcParams, HierGraph, ScenarioConfig, SweepSpec, TrialMetrics
from swarm_resilience.sim import breakdown_accounting, control_step, route_measurement, run_trial

__version__ = "0.1.0"

__all__ = [
    "MultiplexLayer",
    "bellman_oracle",
    "build_backup_layer",
    "run_to_convergence",
    "ScoreResult",
    "decide",
    "detection_threshold",
    "recovery_threshold",
    "score",
    "ConfigError",
    "SwarmResilienceError",
    "ChannelModel",
    "FaultProcess",
    "advance_fault",
    "apply_channel",
    "build_random_hhc",
    "remove_and_reconfigure",
    "validate_hhc",
    "emit_reports",
    "parse_config",
    "run_sweep",
    "AbmcParams",
    "HierGraph",
    "ScenarioConfig",
    "SweepSpec",
    "TrialMetrics",
    "breakdown_accounting",
    "control_step",
    "route_measurement",
    "run_trial",
]
