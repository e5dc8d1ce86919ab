# swarm_resilience/graph/serialization.py

"""
Line-based text format for HierGraph.

Layout:

    # swarm-resilience graph v1
    # leader=1 first_follower=2 epoch=0 start_time=0.000000
    id;parents;position;hierarchy;role

one record per robot in id order, parents and coordinates comma-separated,
coordinates with six decimals.
"""

import re
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from swarm_resilience.errors import TopologyError
from swarm_resilience.models.graph import Epoch, HierGraph, RobotId

FORMAT_HEADER = "# swarm-resilience graph v1"
_META = re.compile(r"^# leader=(\d+) first_follower=(\d+) epoch=(\d+) start_time=(\S+)$")


def dumps_graph(g: HierGraph) -> str:
    lines = [
        FORMAT_HEADER,
        f"# leader={g.leader} first_follower={g.first_follower} "
        f"epoch={g.epoch.index} start_time={g.epoch.start_time:.6f}",
    ]
    for i in g.robots:
        parents = ",".join(str(p) for p in g.parents[i])
        coords = ",".join(f"{x:.6f}" for x in g.position(i))
        lines.append(f"{i};{parents};{coords};{g.hierarchy[i]};{g.role_of(i)}")
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> HierGraph:
    """
    Parse the text format back into a HierGraph.

    Raises:
        TopologyError: On a malformed header or record.
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 2 or lines[0] != FORMAT_HEADER:
        raise TopologyError("Missing graph format header")
    meta = _META.match(lines[1])
    if not meta:
        raise TopologyError(f"Malformed graph metadata line: {lines[1]!r}")
    leader, first, epoch_index = (int(meta.group(k)) for k in (1, 2, 3))
    start_time = float(meta.group(4))

    parents: Dict[RobotId, Tuple[RobotId, ...]] = {}
    positions: Dict[RobotId, np.ndarray] = {}
    hierarchy: Dict[RobotId, int] = {}
    roles: Dict[RobotId, RobotId] = {}
    for lineno, line in enumerate(lines[2:], start=3):
        fields = line.split(";")
        if len(fields) != 5:
            raise TopologyError(f"Line {lineno}: expected 5 fields, got {len(fields)}")
        try:
            i = int(fields[0])
            parents[i] = tuple(int(p) for p in fields[1].split(",") if p)
            positions[i] = np.array([float(x) for x in fields[2].split(",")])
            hierarchy[i] = int(fields[3])
            roles[i] = int(fields[4])
        except ValueError as e:
            raise TopologyError(f"Line {lineno}: {e}") from e

    identity = all(role == i for i, role in roles.items())
    return HierGraph(
        parents=parents,
        positions=positions,
        hierarchy=hierarchy,
        leader=leader,
        first_follower=first,
        epoch=Epoch(epoch_index, start_time),
        roles=None if identity else roles,
    )


def write_graph(g: HierGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps_graph(g), encoding="utf-8")
    return path


def read_graph(path: Union[str, Path]) -> HierGraph:
    return loads_graph(Path(path).read_text(encoding="utf-8"))
