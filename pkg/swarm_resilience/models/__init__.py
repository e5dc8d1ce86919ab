"""Configuration models, graph types and result records."""

from swarm_resilience.models.graph import Edge, Epoch, HierGraph, RobotId, ValidationReport, Violation
from swarm_resilience.models.metrics import AggregateResult, CellAggregate, TrialMetrics, TrialRecord
from swarm_resilience.models.scenario_config import (
    AbmcParams,
    BurstMeta,
    ChannelMeta,
    DetectorParams,
    FaultMeta,
    GraphMeta,
    ScenarioConfig,
    SweepAxis,
    SweepSpec,
)

__all__ = [
    "Edge",
    "Epoch",
    "HierGraph",
    "RobotId",
    "ValidationReport",
    "Violation",
    "AggregateResult",
    "CellAggregate",
    "TrialMetrics",
    "TrialRecord",
    "AbmcParams",
    "BurstMeta",
    "ChannelMeta",
    "DetectorParams",
    "FaultMeta",
    "GraphMeta",
    "ScenarioConfig",
    "SweepAxis",
    "SweepSpec",
]
