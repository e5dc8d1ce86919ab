# swarm_resilience/abmc/oracle.py

"""Exact minimum-cost reference for the consensus fixed point."""

import math
from typing import Dict, Iterable, Mapping, Optional, Tuple

import networkx as nx

from swarm_resilience.errors import TopologyError
from swarm_resilience.models.graph import RobotId


def bellman_oracle(
    next_hops: Mapping[RobotId, Iterable[RobotId]],
    biases: Mapping[Tuple[RobotId, RobotId], float],
    leader_cost: float = 0.0,
    fixed: Optional[Mapping[RobotId, float]] = None,
    leader: RobotId = 1,
) -> Dict[RobotId, float]:
    """
    Minimum cumulative bias to the leader by dynamic programming.

    Robots are processed in topological order of the next-hop graph, so every
    next hop is resolved before the robots that use it.

    Args:
        next_hops: Robot -> robots it may forward through.
        biases: (i, j) -> bias of hop i -> j.
        leader_cost: Fixed cost of the leader.
        fixed: Other robots with fixed costs (e.g. the first follower).
        leader: Leader id.

    Returns:
        Robot -> cost; math.inf for robots that cannot reach a fixed robot.

    Raises:
        TopologyError: If the next-hop graph is cyclic.
    """
    costs: Dict[RobotId, float] = {leader: float(leader_cost)}
    costs.update({i: float(v) for i, v in (fixed or {}).items()})

    dg = nx.DiGraph()
    dg.add_nodes_from(costs)
    for i, hops in next_hops.items():
        dg.add_node(i)
        dg.add_edges_from((j, i) for j in hops)
    try:
        order = list(nx.topological_sort(dg))
    except nx.NetworkXUnfeasible as e:
        raise TopologyError("Next-hop graph is cyclic") from e

    for i in order:
        if i in costs:
            continue
        options = [costs[j] + biases[(i, j)] for j in next_hops.get(i, ())]
        costs[i] = min(options, default=math.inf)
    return costs
