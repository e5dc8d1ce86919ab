"""Discrete-time swarm simulation."""

from swarm_resilience.sim.dynamics import control_step, tracking_errors
from swarm_resilience.sim.routing import MeasurementBus, route_measurement
from swarm_resilience.sim.trial import breakdown_accounting, build_scenario_graphs, fault_links, run_trial

__all__ = [
    "control_step",
    "tracking_errors",
    "MeasurementBus",
    "route_measurement",
    "breakdown_accounting",
    "build_scenario_graphs",
    "fault_links",
    "run_trial",
]
