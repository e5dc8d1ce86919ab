# swarm_resilience/graph/construction.py

"""
Random HHC-style graph construction and spatial queries.

Functions:
    sample_in_ball: Default placement sampler (uniform in a d-ball).
    build_random_hhc: Grow a random rooted graph robot by robot, restarting on a stall.
    neighbors_in_range: Robots within a Euclidean radius.
"""

import logging
from itertools import combinations
from typing import Callable, Dict, List, Optional, Set, Tuple

import numpy as np

from swarm_resilience.errors import InvalidSizeError, TopologyError
from swarm_resilience.models.graph import Epoch, HierGraph, RobotId

logger = logging.getLogger(__name__)

PlacementSampler = Callable[[np.random.Generator, np.ndarray, float], np.ndarray]


def sample_in_ball(rng: np.random.Generator, center: np.ndarray, radius: float) -> np.ndarray:
    """Uniform sample inside the ball of the given radius around center."""
    d = center.shape[0]
    direction = rng.normal(size=d)
    norm = np.linalg.norm(direction)
    if norm == 0:
        direction = np.eye(d)[0]
        norm = 1.0
    scale = radius * rng.random() ** (1.0 / d)
    return center + direction / norm * scale


def build_random_hhc(
    n: int,
    max_leader_children: int = 4,
    max_follower_children: int = 3,
    placement: Optional[PlacementSampler] = None,
    rng: Optional[np.random.Generator] = None,
    comm_range: float = 2.0,
    min_separation: float = 0.5,
    d: int = 2,
    max_attempts: int = 2000,
    max_restarts: int = 10,
) -> HierGraph:
    """
    Build a random HHC-style graph by incremental addition.

    The leader sits at the origin and the first follower is placed within
    range of it. Each further robot is rejection-sampled near an existing
    robot with spare child capacity and takes the two nearest in-range robots
    with spare capacity and distinct hierarchy levels as parents. A parent
    pair is skipped when it would leave no two open robots of distinct levels
    within reach of a common point, since the next robot could then never be
    placed. Should growth still stall, it starts over from the leader with
    the same generator, at most max_restarts times.

    Args:
        n: Number of robots (ids 1..n, robot 1 is the leader).
        max_leader_children: Child cap of the leader.
        max_follower_children: Child cap of every follower.
        placement: Sampler (rng, anchor position, radius) -> candidate position.
        rng: Seeded generator; a fresh default generator is used when omitted.
        comm_range: Both parents must lie within this distance (m).
        min_separation: Minimum distance to every placed robot (m).
        d: Spatial dimension.
        max_attempts: Rejection-sampling attempts per robot.
        max_restarts: Full restarts allowed after a stalled growth.

    Returns:
        HierGraph satisfying all HHC invariants.

    Raises:
        InvalidSizeError: If n < 2.
        TopologyError: If no growth completes within max_restarts restarts.
    """
    if n < 2:
        raise InvalidSizeError(f"An HHC graph needs at least 2 robots, got {n}")
    rng = rng if rng is not None else np.random.default_rng()
    placement = placement or sample_in_ball

    for restart in range(max_restarts + 1):
        try:
            graph = _grow(
                n,
                max_leader_children,
                max_follower_children,
                placement,
                rng,
                comm_range,
                min_separation,
                d,
                max_attempts,
            )
        except TopologyError as e:
            logger.debug(f"HHC growth stalled ({e}); restart {restart + 1} of {max_restarts}")
            continue
        logger.debug(f"Built HHC graph with {n} robots and {max(graph.hierarchy.values())} hierarchy levels")
        return graph
    raise TopologyError(f"Could not grow an HHC graph of {n} robots in {max_restarts + 1} tries")


def _grow(
    n: int,
    max_leader_children: int,
    max_follower_children: int,
    placement: PlacementSampler,
    rng: np.random.Generator,
    comm_range: float,
    min_separation: float,
    d: int,
    max_attempts: int,
) -> HierGraph:
    leader, first = 1, 2

    positions: Dict[RobotId, np.ndarray] = {leader: np.zeros(d)}
    parents: Dict[RobotId, Tuple[RobotId, ...]] = {leader: ()}
    hierarchy: Dict[RobotId, int] = {leader: 0}
    child_count: Dict[RobotId, int] = {leader: 0}

    def capacity(j: RobotId) -> int:
        return max_leader_children if j == leader else max_follower_children

    def separated(point: np.ndarray) -> bool:
        return all(np.linalg.norm(point - p) >= min_separation for p in positions.values())

    def add(i: RobotId, point: np.ndarray, ps: Tuple[RobotId, ...]) -> None:
        positions[i] = point
        parents[i] = ps
        hierarchy[i] = 1 + max(hierarchy[p] for p in ps)
        child_count[i] = 0
        for p in ps:
            child_count[p] += 1

    def extendable(
        open_ids: List[RobotId], i: RobotId, point: np.ndarray, ps: Tuple[RobotId, ...]
    ) -> bool:
        # Open set after robot i joins with parents ps
        still_open = [j for j in open_ids if not (j in ps and child_count[j] + 1 >= capacity(j))]
        spots = [(hierarchy[j], positions[j]) for j in still_open]
        spots.append((1 + max(hierarchy[p] for p in ps), point))
        return any(
            level_a != level_b and np.linalg.norm(pos_a - pos_b) <= 2 * comm_range
            for (level_a, pos_a), (level_b, pos_b) in combinations(spots, 2)
        )

    for _ in range(max_attempts):
        point = placement(rng, positions[leader], comm_range)
        if separated(point) and np.linalg.norm(point) <= comm_range:
            add(first, point, (leader,))
            break
    else:
        raise TopologyError("Could not place the first follower")

    for i in range(3, n + 1):
        placed = False
        for _ in range(max_attempts):
            open_ids: List[RobotId] = sorted(j for j in parents if child_count[j] < capacity(j))
            if len(open_ids) < 2:
                break
            anchor = open_ids[int(rng.integers(len(open_ids)))]
            point = placement(rng, positions[anchor], comm_range)
            if not separated(point):
                continue
            in_range = sorted(
                (float(np.linalg.norm(point - positions[j])), j)
                for j in open_ids
                if np.linalg.norm(point - positions[j]) <= comm_range
            )
            if not in_range:
                continue
            nearest = in_range[0][1]
            partner = next(
                (
                    j
                    for _, j in in_range[1:]
                    if hierarchy[j] != hierarchy[nearest]
                    and (i == n or extendable(open_ids, i, point, (nearest, j)))
                ),
                None,
            )
            if partner is None:
                continue
            add(i, point, (nearest, partner))
            placed = True
            break
        if not placed:
            raise TopologyError(f"Could not place robot {i} after {max_attempts} attempts")

    return HierGraph(
        parents=parents,
        positions=positions,
        hierarchy=hierarchy,
        leader=leader,
        first_follower=first,
        epoch=Epoch(0, 0.0),
    )


def neighbors_in_range(g: HierGraph, i: RobotId, r: float) -> Set[RobotId]:
    """
    Robots within Euclidean distance r of robot i (i itself excluded).

    Raises:
        ValueError: If r <= 0.
        UnknownRobotError: If i is not in the graph.
    """
    if r <= 0:
        raise ValueError(f"Range must be positive, got {r}")
    g.require(i)
    ids, tree = g._index
    hits = tree.query_ball_point(g.position(i), r)
    return {ids[k] for k in hits} - {i}
