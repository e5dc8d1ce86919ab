# swarm_resilience/graph/reconfigure.py

"""
Robot removal with formation role reassignment.

Functions:
    role_order: Parent-closed ordering of formation roles.
    remove_and_reconfigure: Remove failed robots and let survivors take over vacated roles.
"""

import dataclasses
import heapq
import logging
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from swarm_resilience.errors import DegenerateSwarmError, UnknownRobotError, UnsupportedScenarioError
from swarm_resilience.graph.validation import recompute_hierarchy
from swarm_resilience.models.graph import Epoch, HierGraph, RobotId

logger = logging.getLogger(__name__)


def role_order(g: HierGraph) -> List[RobotId]:
    """Roles sorted by (hierarchy, id); every prefix is closed under parents."""
    return sorted(g.parents, key=lambda i: (g.hierarchy[i], i))


def remove_and_reconfigure(
    g: HierGraph,
    failed: Iterable[RobotId],
    formation_targets: Optional[Mapping[RobotId, np.ndarray]] = None,
    at_time: Optional[float] = None,
) -> HierGraph:
    """
    Remove failed robots and reassign formation roles to the survivors.

    The formation shrinks to the first m roles in hierarchy order, m being
    the survivor count. Vacated roles are filled in that order: each goes to
    the survivor nearest its formation target among those holding a later
    role (ties to the lowest id), which in turn vacates that survivor's old
    role. The resulting graph has the kept roles' structure, survivor ids,
    and the role targets as positions.

    Args:
        g: Graph of the current epoch.
        failed: Robots to remove.
        formation_targets: Role id -> target coordinate; defaults to g.positions.
        at_time: Start time of the new epoch; defaults to the current epoch's.

    Returns:
        Valid HierGraph of the next epoch (g itself when nothing failed).

    Raises:
        UnknownRobotError: If a failed id is not in the graph.
        UnsupportedScenarioError: If the leader is among the failed robots.
        DegenerateSwarmError: If fewer than two robots survive.
    """
    failed = set(failed)
    if not failed:
        return g
    unknown = sorted(i for i in failed if i not in g.parents)
    if unknown:
        raise UnknownRobotError(f"Cannot remove unknown robots {unknown}")
    if g.leader in failed:
        raise UnsupportedScenarioError("Leader failure is outside the supported fault model")
    survivors = sorted(set(g.parents) - failed)
    if len(survivors) < 2:
        raise DegenerateSwarmError(f"Only {len(survivors)} robot(s) would survive")

    targets = formation_targets if formation_targets is not None else g.positions
    order = role_order(g)
    rank = {role: k for k, role in enumerate(order)}
    m = len(survivors)
    kept = order[:m]

    # Each survivor starts in its own role; ranks >= m sit outside the formation
    role_of: Dict[RobotId, RobotId] = {i: i for i in survivors}
    holder: Dict[RobotId, RobotId] = {i: i for i in survivors if rank[i] < m}
    vacated: List[Tuple[int, RobotId]] = [(rank[role], role) for role in kept if role not in holder]
    heapq.heapify(vacated)

    while vacated:
        slot_rank, slot = heapq.heappop(vacated)
        target = np.asarray(targets[slot], dtype=float)
        movers = [i for i in survivors if rank[role_of[i]] > slot_rank]
        best = min(
            movers,
            key=lambda i: (float(np.linalg.norm(g.position(i) - target)), i),
        )
        old = role_of[best]
        role_of[best] = slot
        holder[slot] = best
        if rank[old] < m:
            del holder[old]
            heapq.heappush(vacated, (rank[old], old))
        logger.debug(f"Robot {best} takes over role {slot} (left role {old})")

    parents = {i: tuple(holder[p] for p in g.parents[role_of[i]]) for i in survivors}
    positions = {i: np.asarray(targets[role_of[i]], dtype=float) for i in survivors}
    hierarchy = {i: g.hierarchy[role_of[i]] for i in survivors}
    roles = {i: g.role_of(role_of[i]) for i in survivors}
    start = at_time if at_time is not None else g.epoch.start_time

    reconfigured = HierGraph(
        parents=parents,
        positions=positions,
        hierarchy=hierarchy,
        leader=g.leader,
        first_follower=holder[g.first_follower],
        epoch=Epoch(g.epoch.index + 1, start),
        roles=roles,
    )
    logger.info(
        f"Reconfigured swarm: removed {sorted(failed)}, {m} robots remain (epoch {reconfigured.epoch.index})"
    )
    return recompute_hierarchy(reconfigured)
