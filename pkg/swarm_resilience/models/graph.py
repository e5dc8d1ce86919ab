# swarm_resilience/models/graph.py

"""
Core graph records for hierarchical robot swarms.

Classes:
    Epoch: Interval of constant topology.
    HierGraph: Rooted directed graph of robots with parents, hierarchy levels and positions.
    Violation: One failed structural check.
    ValidationReport: Result of validate_hhc.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from swarm_resilience.errors import UnknownRobotError

RobotId = int
Edge = Tuple[RobotId, RobotId]  # (child, parent)


@dataclass(frozen=True)
class Epoch:
    index: int = 0
    start_time: float = 0.0


@dataclass(frozen=True, eq=False)
class HierGraph:
    """
    Immutable swarm topology for one epoch.

    Attributes:
        parents: Child id -> ordered tuple of parent ids (leader maps to ()).
        positions: Robot id -> coordinate vector in meters (d = 2 or 3).
        hierarchy: Robot id -> hierarchy level (leader = 0).
        leader: Leader id.
        first_follower: First follower id (sole parent is the leader).
        epoch: Epoch the topology belongs to.
        roles: Robot id -> formation role it occupies (identity unless reconfigured).
    """

    parents: Mapping[RobotId, Tuple[RobotId, ...]]
    positions: Mapping[RobotId, np.ndarray]
    hierarchy: Mapping[RobotId, int]
    leader: RobotId = 1
    first_follower: RobotId = 2
    epoch: Epoch = field(default_factory=Epoch)
    roles: Optional[Mapping[RobotId, RobotId]] = None

    @property
    def robots(self) -> List[RobotId]:
        return sorted(self.parents)

    @property
    def n(self) -> int:
        return len(self.parents)

    @property
    def dim(self) -> int:
        first = next(iter(self.positions.values()))
        return int(np.asarray(first).shape[0])

    @cached_property
    def edges(self) -> FrozenSet[Edge]:
        return frozenset((c, p) for c, ps in self.parents.items() for p in ps)

    @cached_property
    def _children(self) -> Dict[RobotId, Tuple[RobotId, ...]]:
        children: Dict[RobotId, List[RobotId]] = {i: [] for i in self.parents}
        for child, ps in self.parents.items():
            for p in ps:
                children.setdefault(p, []).append(child)
        return {k: tuple(sorted(v)) for k, v in children.items()}

    @cached_property
    def _index(self) -> Tuple[List[RobotId], cKDTree]:
        ids = self.robots
        coords = np.vstack([np.asarray(self.positions[i], dtype=float) for i in ids])
        return ids, cKDTree(coords)

    def require(self, i: RobotId) -> None:
        if i not in self.parents:
            raise UnknownRobotError(f"Robot {i} is not part of this graph")

    def children(self, j: RobotId) -> Tuple[RobotId, ...]:
        """Robots that list j as a primary parent."""
        self.require(j)
        return self._children.get(j, ())

    def out_degree(self, j: RobotId) -> int:
        """Primary outdegree: number of robots receiving data from j."""
        return len(self.children(j))

    def position(self, i: RobotId) -> np.ndarray:
        self.require(i)
        return np.asarray(self.positions[i], dtype=float)

    def distance(self, i: RobotId, j: RobotId) -> float:
        return float(np.linalg.norm(self.position(i) - self.position(j)))

    def is_follower(self, i: RobotId) -> bool:
        """Standard follower: neither the leader nor the first follower."""
        return i not in (self.leader, self.first_follower)

    def followers(self) -> List[RobotId]:
        return [i for i in self.robots if self.is_follower(i)]

    def role_of(self, i: RobotId) -> RobotId:
        if self.roles is None:
            return i
        return self.roles.get(i, i)

    def to_networkx(self) -> nx.DiGraph:
        """Directed graph with child -> parent edges (towards the leader)."""
        dg = nx.DiGraph()
        dg.add_nodes_from(self.parents)
        dg.add_edges_from(self.edges)
        return dg

    def primary_hops(self) -> Dict[RobotId, int]:
        """Shortest primary hop count from each robot to the leader."""
        lengths = nx.single_target_shortest_path_length(self.to_networkx(), self.leader)
        return dict(lengths)


@dataclass(frozen=True)
class Violation:
    kind: str
    robots: Tuple[RobotId, ...]
    detail: str = ""


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> Set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, robots, detail: str = "") -> None:
        self.violations.append(Violation(kind, tuple(sorted(robots)), detail))

    def __str__(self) -> str:
        if not self.violations:
            return "valid"
        return "; ".join(f"{v.kind}: {list(v.robots)} {v.detail}".strip() for v in self.violations)
