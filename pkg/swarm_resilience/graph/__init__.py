"""Graph construction, validation, reconfiguration and serialization."""

from swarm_resilience.graph.construction import build_random_hhc, neighbors_in_range, sample_in_ball
from swarm_resilience.graph.reconfigure import remove_and_reconfigure, role_order
from swarm_resilience.graph.serialization import dumps_graph, loads_graph, read_graph, write_graph
from swarm_resilience.graph.validation import recompute_hierarchy, validate_hhc

__all__ = [
    "build_random_hhc",
    "neighbors_in_range",
    "sample_in_ball",
    "remove_and_reconfigure",
    "role_order",
    "dumps_graph",
    "loads_graph",
    "read_graph",
    "write_graph",
    "recompute_hierarchy",
    "validate_hhc",
]
