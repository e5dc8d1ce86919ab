# swarm_resilience/sim/routing.py

"""
Delivery of parent data over the primary link or a backup path.

Each tick the simulation fills a MeasurementBus with the primary
measurement of every control edge and the backup-path measurements of every
monitored edge; route_measurement then picks what the child actually uses.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from swarm_resilience.abmc.paths import MultiplexLayer
from swarm_resilience.detector.monitor import ParentMonitor
from swarm_resilience.errors import EpochMismatchError
from swarm_resilience.fault.channel import Measurement
from swarm_resilience.models.graph import Edge, HierGraph


@dataclass
class MeasurementBus:
    """Measurements available during one tick."""

    tick: int
    primary: Dict[Edge, Measurement] = field(default_factory=dict)
    backup: Dict[Tuple[Edge, int], Measurement] = field(default_factory=dict)


def route_measurement(
    g: HierGraph,
    layer: MultiplexLayer,
    monitors: Mapping[Edge, ParentMonitor],
    edge: Edge,
    tick: int,
    bus: MeasurementBus,
    mitigation_enabled: bool = True,
) -> Measurement:
    """
    Measurement of parent j delivered to robot i for edge (i, j).

    Without mitigation, without a monitor, or while the monitor routes over
    the primary link, the primary measurement is delivered; otherwise the
    measurement that travelled the chosen backup path.

    Raises:
        EpochMismatchError: If the layer belongs to another epoch or the
            route names a path the layer does not have.
        ValueError: If the bus holds another tick.
        KeyError: If the bus lacks the needed measurement.
    """
    if layer.epoch != g.epoch.index:
        raise EpochMismatchError(f"Backup layer of epoch {layer.epoch} used on graph epoch {g.epoch.index}")
    if bus.tick != tick:
        raise ValueError(f"Measurement bus holds tick {bus.tick}, asked for tick {tick}")
    monitor: Optional[ParentMonitor] = monitors.get(edge)
    if not mitigation_enabled or monitor is None or monitor.route is None:
        return bus.primary[edge]
    i = edge[0]
    if not layer.covers(i) or monitor.route >= len(layer.paths[i]):
        raise EpochMismatchError(f"Robot {i} routes over backup {monitor.route}, unknown to the current layer")
    return bus.backup[(edge, monitor.route)]
