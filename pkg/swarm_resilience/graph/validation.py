# swarm_resilience/graph/validation.py

"""
Structural checks for hierarchical swarm graphs.

Functions:
    validate_hhc: Report every violated HHC invariant.
    recompute_hierarchy: Recalculate hierarchy levels from the parent relation.
"""

import dataclasses
import logging
from typing import Dict

import networkx as nx
import numpy as np

from swarm_resilience.errors import TopologyError
from swarm_resilience.models.graph import HierGraph, RobotId, ValidationReport

logger = logging.getLogger(__name__)


def validate_hhc(g: HierGraph) -> ValidationReport:
    """
    Check the HHC invariants of a graph.

    Violation kinds: "leader-parents", "first-follower", "parent-count",
    "unknown-parent", "parent-levels", "hierarchy", "cycle", "reachability",
    "positions".

    Args:
        g: Graph to check.

    Returns:
        ValidationReport, empty iff the graph is valid.
    """
    report = ValidationReport()
    robots = set(g.parents)
    leader, first = g.leader, g.first_follower

    if leader not in robots:
        report.add("leader-parents", [leader], "leader missing")
        return report
    if g.parents[leader]:
        report.add("leader-parents", [leader], "leader must have no parents")
    if first not in robots or tuple(g.parents[first]) != (leader,):
        report.add("first-follower", [first], "sole parent must be the leader")

    for i in sorted(robots):
        ps = tuple(g.parents[i])
        unknown = [p for p in ps if p not in robots]
        if unknown:
            report.add("unknown-parent", [i], f"parents {unknown} not in graph")
        if i in (leader, first):
            continue
        if len(ps) != 2 or len(set(ps)) != 2:
            report.add("parent-count", [i], f"has parents {list(ps)}")
        elif not unknown:
            levels = [g.hierarchy.get(p) for p in ps]
            if levels[0] == levels[1]:
                report.add("parent-levels", [i], f"parents share level {levels[0]}")

    bad_levels = []
    for i in sorted(robots):
        ps = [p for p in g.parents[i] if p in robots]
        if i == leader:
            expected = 0
        elif not ps or any(p not in g.hierarchy for p in ps):
            expected = None
        else:
            expected = 1 + max(g.hierarchy[p] for p in ps)
        if g.hierarchy.get(i) != expected:
            bad_levels.append(i)
    if bad_levels:
        report.add("hierarchy", bad_levels, "level differs from 1 + max parent level")

    dg = nx.DiGraph()
    dg.add_nodes_from(robots)
    dg.add_edges_from((c, p) for c, p in g.edges if p in robots)
    if not nx.is_directed_acyclic_graph(dg):
        on_cycle = set()
        for component in nx.strongly_connected_components(dg):
            if len(component) > 1:
                on_cycle |= component
        on_cycle |= {i for i in robots if dg.has_edge(i, i)}
        report.add("cycle", on_cycle, "parent relation is cyclic")

    reaching = nx.ancestors(dg, leader) | {leader}
    stranded = robots - reaching
    if stranded:
        report.add("reachability", stranded, "cannot reach the leader through parents")

    missing = [
        i for i in sorted(robots)
        if i not in g.positions or not np.all(np.isfinite(np.asarray(g.positions[i], dtype=float)))
    ]
    if missing:
        report.add("positions", missing, "missing or non-finite position")

    if not report.valid:
        logger.debug(f"HHC validation found {len(report.violations)} violations: {report}")
    return report


def recompute_hierarchy(g: HierGraph) -> HierGraph:
    """
    Recalculate hierarchy levels: leader 0, others 1 + max parent level.

    Args:
        g: Acyclic graph containing its leader.

    Returns:
        Copy of g with recomputed hierarchy.

    Raises:
        TopologyError: If the parent relation is cyclic, the leader is missing,
            or a non-leader robot has no parents.
    """
    if g.leader not in g.parents:
        raise TopologyError(f"Leader {g.leader} missing from graph")
    dg = g.to_networkx()
    try:
        order = list(nx.topological_sort(dg))
    except nx.NetworkXUnfeasible as e:
        raise TopologyError("Cycle detected while recomputing hierarchy") from e

    levels: Dict[RobotId, int] = {}
    # Edges point child -> parent, so parents come last in topological order
    for i in reversed(order):
        if i == g.leader:
            levels[i] = 0
            continue
        ps = g.parents.get(i, ())
        if not ps:
            raise TopologyError(f"Robot {i} has no parents")
        levels[i] = 1 + max(levels[p] for p in ps)
    return dataclasses.replace(g, hierarchy=levels)
