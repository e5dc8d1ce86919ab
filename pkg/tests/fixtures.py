# Hand-built graphs and small scenarios shared by the test modules.

from typing import Dict, Tuple

import numpy as np

from swarm_resilience.graph.validation import recompute_hierarchy
from swarm_resilience.models.graph import HierGraph
from swarm_resilience.models.scenario_config import ScenarioConfig


def make_graph(parents: Dict[int, Tuple[int, ...]], positions: Dict[int, Tuple[float, ...]]) -> HierGraph:
    """Graph from parents and positions with hierarchy levels derived from the parents."""
    draft = HierGraph(
        parents=parents,
        positions={i: np.asarray(p, dtype=float) for i, p in positions.items()},
        hierarchy={i: 0 for i in parents},
    )
    return recompute_hierarchy(draft)


EIGHT_ROBOT_PARENTS = {
    1: (),
    2: (1,),
    3: (1, 2),
    4: (2, 3),
    5: (1, 3),
    6: (3, 4),
    7: (5, 6),
    8: (4, 6),
}

EIGHT_ROBOT_POSITIONS = {
    1: (0.0, 0.0),
    2: (1.0, 0.0),
    3: (0.5, 0.8),
    4: (1.5, 0.8),
    5: (-0.5, 0.8),
    6: (1.0, 1.6),
    7: (0.0, 1.6),
    8: (2.0, 1.6),
}


def eight_robot_graph() -> HierGraph:
    """
    Levels 0..5:

        1 (0)  2 (1)  3 (2)  4, 5 (3)  6 (4)  7, 8 (5)

    With r = 2 m robot 3 has no candidate parents and robot 7 sees 1, 2, 3, 4.
    """
    return make_graph(EIGHT_ROBOT_PARENTS, EIGHT_ROBOT_POSITIONS)


def two_robot_graph() -> HierGraph:
    return make_graph({1: (), 2: (1,)}, {1: (0.0, 0.0), 2: (1.0, 0.0)})


def small_scenario(**overrides) -> ScenarioConfig:
    """Short, small scenario suitable for unit tests."""
    data = {
        "n": 8,
        "seed": 3,
        "duration": 4.0,
        "dt": 0.1,
        "detector": {"window": 5},
    }
    data.update(overrides)
    return ScenarioConfig.from_dict(data)
