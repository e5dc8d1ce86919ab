# swarm_resilience/abmc/paths.py

"""
Backup path extraction and the multiplex backup layer.

Classes:
    BackupPath: One robot sequence from a follower to the leader.
    BackupPathSet: Minimum-cost path plus alternatives of one follower.
    MultiplexLayer: Backup paths of every covered follower for one epoch.

Functions:
    backtrack: Follow selected backup parents to the leader.
    extract_backup_paths: Minimum and alternative paths of one follower.
    build_backup_layer: Run consensus passes and collect every follower's paths.
    write_backup_layer_csv: Export a layer as CSV.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Literal, Optional, Tuple, Union

import pandas as pd

from swarm_resilience.abmc.protocol import (
    AbmcState,
    freeze_table,
    initial_state,
    run_to_convergence,
)
from swarm_resilience.errors import BacktrackCycleError, TopologyError
from swarm_resilience.models.graph import Edge, HierGraph, RobotId
from swarm_resilience.models.scenario_config import AbmcParams

logger = logging.getLogger(__name__)

LAYER_COLUMNS = ["robot", "path_type", "rank", "hops", "path", "cost"]


@dataclass(frozen=True)
class BackupPath:
    robots: Tuple[RobotId, ...]
    cost: float
    kind: Literal["min", "alt"] = "min"

    @property
    def hops(self) -> int:
        return len(self.robots) - 1

    @property
    def edges(self) -> FrozenSet[Edge]:
        return frozenset(zip(self.robots[:-1], self.robots[1:]))

    def label(self) -> str:
        return ">".join(str(i) for i in self.robots)


@dataclass(frozen=True)
class BackupPathSet:
    """
    Backup paths of one follower.

    Attributes:
        robot: Follower id.
        min_path: Minimum-cost path (index 0 for routing).
        alternatives: Paths within the cost slack, ordered by cost (indices 1..).
    """

    robot: RobotId
    min_path: BackupPath
    alternatives: Tuple[BackupPath, ...] = ()

    @property
    def paths(self) -> Tuple[BackupPath, ...]:
        return (self.min_path,) + self.alternatives

    @property
    def min_edges(self) -> FrozenSet[Edge]:
        return self.min_path.edges

    @property
    def alt_edges(self) -> FrozenSet[Edge]:
        edges = frozenset()
        for path in self.alternatives:
            edges |= path.edges
        return edges - self.min_edges

    def __len__(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class MultiplexLayer:
    """
    Backup network layer of one epoch.

    Attributes:
        paths: Follower -> its BackupPathSet.
        unreachable: Followers without a backup route of their own.
        epoch: Epoch index of the graph the layer was built on.
        converged: Whether the final consensus pass converged.
        passes: Consensus passes run.
        state: Final consensus state.
    """

    paths: Dict[RobotId, BackupPathSet]
    unreachable: Tuple[RobotId, ...] = ()
    epoch: int = 0
    converged: bool = True
    passes: int = 0
    state: Optional[AbmcState] = field(default=None, repr=False)

    def covers(self, i: RobotId) -> bool:
        return i in self.paths

    def hop_histogram(self) -> Dict[int, int]:
        """Minimum backup path hop count -> number of followers."""
        return dict(sorted(Counter(ps.min_path.hops for ps in self.paths.values()).items()))

    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for robot in sorted(self.paths):
            for rank, path in enumerate(self.paths[robot].paths):
                rows.append(
                    {
                        "robot": robot,
                        "path_type": path.kind,
                        "rank": rank,
                        "hops": path.hops,
                        "path": path.label(),
                        "cost": path.cost,
                    }
                )
        return pd.DataFrame(rows, columns=LAYER_COLUMNS)


def backtrack(state: AbmcState, g: HierGraph, start: RobotId) -> List[RobotId]:
    """
    Follow backup parents from start to the leader.

    The first follower forwards over its primary edge to the leader.

    Raises:
        BacktrackCycleError: If a robot has no backup parent or the walk
            exceeds the robot count.
    """
    path = [start]
    current = start
    while current != g.leader:
        if len(path) > g.n:
            raise BacktrackCycleError(f"Backtracking from {start} exceeded {g.n} hops: {path}")
        if current == g.first_follower:
            nxt = g.leader
        else:
            nxt = state.backup_parent.get(current)
        if nxt is None:
            raise BacktrackCycleError(f"Robot {current} has no backup parent (from {start})")
        path.append(nxt)
        current = nxt
    return path


def extract_backup_paths(state: AbmcState, g: HierGraph, p: AbmcParams, i: RobotId) -> BackupPathSet:
    """
    Minimum-cost path and alternatives of follower i.

    Alternatives are the other candidates j whose cost s_j + a_ij lies within
    tau of the minimum (exact ties always qualify), each continued along j's
    own minimum path.

    Raises:
        TopologyError: If i has no candidate parents.
        BacktrackCycleError: If backtracking does not reach the leader.
    """
    table = state.table
    candidates = table.candidates.get(i, ())
    if not candidates:
        raise TopologyError(f"Robot {i} has no candidate parents")
    costs = {j: state.s[j] + table.biases[(i, j)] for j in candidates}
    chosen = state.backup_parent.get(i)
    if chosen is None or chosen not in costs:
        chosen = min(candidates, key=lambda j: (costs[j], j))
    best = costs[chosen]

    min_path = BackupPath(tuple(backtrack(state, g, i)), best, "min")
    alternatives = []
    for j in candidates:
        if j == chosen:
            continue
        gap = abs(costs[j] - best)
        if gap < p.tau or gap == 0.0:
            route = (i,) + tuple(backtrack(state, g, j))
            alternatives.append(BackupPath(route, costs[j], "alt"))
    alternatives.sort(key=lambda path: (path.cost, path.robots))
    return BackupPathSet(robot=i, min_path=min_path, alternatives=tuple(alternatives))


def build_backup_layer(g: HierGraph, p: AbmcParams) -> MultiplexLayer:
    """
    Build the backup network layer of an epoch.

    Runs up to p.congestion_passes consensus passes; each pass freezes the
    biases with outdegrees that include the backup edges selected by the
    previous pass, and the loop stops once the selection repeats.

    Args:
        g: Graph of the epoch.
        p: Consensus parameters.

    Returns:
        MultiplexLayer with a BackupPathSet for every covered follower.
    """
    logger.info(f"[BackupLayer] Step 1: consensus on {g.n} robots (epoch {g.epoch.index})")
    selected: Optional[Dict[RobotId, RobotId]] = None
    state: Optional[AbmcState] = None
    converged = True
    passes = 0
    for passes in range(1, p.congestion_passes + 1):
        table = freeze_table(g, p, selected)
        init = initial_state(
            g,
            p,
            table,
            init=None if state is None else state.s,
            backup_parent=None if state is None else state.backup_parent,
        )
        state, converged = run_to_convergence(g, p, init)
        chosen = {
            i: j for i, j in state.backup_parent.items() if j is not None and j in table.candidates.get(i, ())
        }
        if not converged:
            logger.warning(f"[BackupLayer] pass {passes} hit K={p.K} before converging")
        if chosen == selected:
            break
        selected = chosen

    logger.info(f"[BackupLayer] Step 2: extracting paths after {passes} pass(es)")
    paths: Dict[RobotId, BackupPathSet] = {}
    unreachable: List[RobotId] = []
    for i in g.followers():
        if state is None or not state.table.candidates.get(i):
            unreachable.append(i)
            continue
        try:
            paths[i] = extract_backup_paths(state, g, p, i)
        except BacktrackCycleError as e:
            logger.warning(f"[BackupLayer] robot {i} left uncovered: {e}")
            unreachable.append(i)

    logger.info(f"[BackupLayer] covered {len(paths)} followers, {len(unreachable)} without own backup")
    return MultiplexLayer(
        paths=paths,
        unreachable=tuple(sorted(unreachable)),
        epoch=g.epoch.index,
        converged=converged,
        passes=passes,
        state=state,
    )


def write_backup_layer_csv(layer: MultiplexLayer, path: Union[str, Path]) -> Path:
    path = Path(path)
    layer.to_dataframe().to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path
