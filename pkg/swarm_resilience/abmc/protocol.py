# swarm_resilience/abmc/protocol.py

"""
Adaptive biased minimum consensus over candidate backup parents.

Each standard follower keeps a scalar hop-cost estimate s_i and moves it
towards min_j (s_j + a_ij) over its candidate parents with a forward-Euler
step of size dt/eta. The leader and the first follower hold fixed states.

Classes:
    CandidateTable: Frozen candidate sets, next hops and biases of one consensus pass.
    AbmcState: Consensus state after k iterations.

Functions:
    candidate_parents: In-range, non-adjacent, lower-hierarchy robots.
    bias: Hierarchy- and congestion-aware edge bias.
    selected_out_degrees: Primary plus selected backup outdegrees.
    freeze_table: Build the candidate table for one pass.
    initial_state: Consensus start state with a finite sentinel.
    abmc_step: One synchronous consensus iteration.
    run_to_convergence: Iterate until states settle or K is reached.
    beta_envelope: (min, max) of the update residuals.
    bmc_step: Baseline biased minimum consensus on a static undirected graph.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Mapping, Optional, Set, Tuple

from swarm_resilience.graph.construction import neighbors_in_range
from swarm_resilience.models.graph import HierGraph, RobotId
from swarm_resilience.models.scenario_config import AbmcParams

logger = logging.getLogger(__name__)


def candidate_parents(g: HierGraph, i: RobotId, r: float) -> Set[RobotId]:
    """Robots j != i within range r with H_j < H_i and no primary edge (i, j)."""
    level = g.hierarchy[i]
    return {
        j
        for j in neighbors_in_range(g, i, r)
        if (i, j) not in g.edges and g.hierarchy[j] < level
    }


def bias(
    i: RobotId,
    j: RobotId,
    g: HierGraph,
    p: AbmcParams,
    out_degree: Optional[int] = None,
) -> float:
    """
    Edge bias max{1 - rho (H_i - H_j) + psi max{0, deg_j - kappa_d}, gamma}.

    Args:
        i: Robot choosing a backup parent.
        j: Candidate parent.
        g: Graph of the epoch.
        p: Consensus parameters.
        out_degree: Outdegree of j; defaults to its primary outdegree.
    """
    degree = g.out_degree(j) if out_degree is None else out_degree
    congestion = p.psi * max(0, degree - p.kappa_d)
    return max(1.0 - p.rho * (g.hierarchy[i] - g.hierarchy[j]) + congestion, p.gamma)


def selected_out_degrees(
    g: HierGraph,
    candidates: Mapping[RobotId, Tuple[RobotId, ...]],
    backup_parents: Optional[Mapping[RobotId, Optional[RobotId]]] = None,
) -> Dict[RobotId, int]:
    degrees = {j: g.out_degree(j) for j in g.robots}
    for i, j in (backup_parents or {}).items():
        # Fallback relays reuse primary edges that are already counted
        if j is not None and j in candidates.get(i, ()):
            degrees[j] += 1
    return degrees


@dataclass(frozen=True)
class CandidateTable:
    """
    Frozen inputs of one consensus pass.

    Attributes:
        candidates: Follower -> sorted candidate parents (its own backup options).
        next_hops: Follower -> candidates, or its primary parents when it has none.
        biases: (i, j) -> frozen bias for every next hop.
        out_degrees: Outdegrees the biases were computed with.
    """

    candidates: Dict[RobotId, Tuple[RobotId, ...]]
    next_hops: Dict[RobotId, Tuple[RobotId, ...]]
    biases: Dict[Tuple[RobotId, RobotId], float]
    out_degrees: Dict[RobotId, int]

    @property
    def relay_only(self) -> Tuple[RobotId, ...]:
        """Followers with no candidate parent of their own."""
        return tuple(sorted(i for i, c in self.candidates.items() if not c))

    @property
    def max_bias(self) -> float:
        return max(self.biases.values(), default=0.0)


def freeze_table(
    g: HierGraph,
    p: AbmcParams,
    backup_parents: Optional[Mapping[RobotId, Optional[RobotId]]] = None,
) -> CandidateTable:
    candidates = {i: tuple(sorted(candidate_parents(g, i, p.r))) for i in g.followers()}
    degrees = selected_out_degrees(g, candidates, backup_parents)
    next_hops: Dict[RobotId, Tuple[RobotId, ...]] = {}
    biases: Dict[Tuple[RobotId, RobotId], float] = {}
    for i, cands in candidates.items():
        hops = cands or tuple(sorted(g.parents[i]))
        next_hops[i] = hops
        for j in hops:
            biases[(i, j)] = bias(i, j, g, p, degrees[j])
    return CandidateTable(candidates=candidates, next_hops=next_hops, biases=biases, out_degrees=degrees)


@dataclass(frozen=True)
class AbmcState:
    """
    Consensus state.

    Attributes:
        s: Robot -> hop-cost estimate.
        backup_parent: Follower -> selected next hop (None before the first step).
        beta: Robot -> residual -s_i + min_j (s_j + a_ij) of the last step (0 for fixed robots).
        k: Iterations performed.
        table: Candidate table the iterations run on.
        pending: Follower -> (challenger, consecutive improving iterations).
    """

    s: Dict[RobotId, float]
    backup_parent: Dict[RobotId, Optional[RobotId]]
    beta: Dict[RobotId, float]
    table: CandidateTable
    k: int = 0
    pending: Dict[RobotId, Tuple[RobotId, int]] = field(default_factory=dict)

    @property
    def unreachable(self) -> Tuple[RobotId, ...]:
        return self.table.relay_only


def initial_state(
    g: HierGraph,
    p: AbmcParams,
    table: Optional[CandidateTable] = None,
    init: Optional[Mapping[RobotId, float]] = None,
    backup_parent: Optional[Mapping[RobotId, Optional[RobotId]]] = None,
) -> AbmcState:
    """
    Start state: leader and first follower fixed, followers at init or a sentinel.

    The sentinel n * max(1, a_max) + s_2 exceeds every reachable path cost.

    Raises:
        ValueError: If an initial follower state is negative.
    """
    table = table if table is not None else freeze_table(g, p)
    sentinel = g.n * max(1.0, table.max_bias) + p.first_follower_state
    s: Dict[RobotId, float] = {g.leader: p.leader_state}
    if g.first_follower in g.parents:
        s[g.first_follower] = p.first_follower_state
    for i in g.followers():
        value = float(init[i]) if init is not None and i in init else sentinel
        if value < 0:
            raise ValueError(f"Initial state of robot {i} must be nonnegative, got {value}")
        s[i] = value
    parents = {i: (backup_parent or {}).get(i) for i in g.followers()}
    beta = {i: 0.0 for i in s}
    return AbmcState(s=s, backup_parent=parents, beta=beta, table=table)


def _select_parent(
    current: Optional[RobotId],
    best: RobotId,
    costs: Mapping[RobotId, float],
    pending: Optional[Tuple[RobotId, int]],
    p: AbmcParams,
) -> Tuple[RobotId, Optional[Tuple[RobotId, int]]]:
    if current is None or current not in costs:
        return best, None
    if best == current or costs[best] >= costs[current] - p.zeta:
        return current, None
    count = pending[1] + 1 if pending is not None and pending[0] == best else 1
    if count >= max(p.hysteresis, 1):
        return best, None
    return current, (best, count)


def abmc_step(state: AbmcState, g: HierGraph, p: AbmcParams) -> AbmcState:
    """
    One synchronous iteration: every follower reads the previous states only.

    s_i <- (1 - step) s_i + step * min_j (s_j + a_ij). The minimum value drives
    the state; the backup parent follows the argmin (lowest id on ties) with
    hysteresis. Followers without next hops keep their state.
    """
    step = p.step
    table = state.table
    s = dict(state.s)
    beta = {i: 0.0 for i in state.s}
    parents = dict(state.backup_parent)
    pending: Dict[RobotId, Tuple[RobotId, int]] = {}

    for i in g.followers():
        hops = table.next_hops.get(i, ())
        if not hops:
            continue
        costs = {j: state.s[j] + table.biases[(i, j)] for j in hops}
        best = min(hops, key=lambda j: (costs[j], j))
        best_cost = costs[best]
        beta[i] = best_cost - state.s[i]
        s[i] = (1.0 - step) * state.s[i] + step * best_cost
        chosen, waiting = _select_parent(state.backup_parent.get(i), best, costs, state.pending.get(i), p)
        parents[i] = chosen
        if waiting is not None:
            pending[i] = waiting

    return AbmcState(s=s, backup_parent=parents, beta=beta, table=table, k=state.k + 1, pending=pending)


def run_to_convergence(
    g: HierGraph,
    p: AbmcParams,
    init: Optional[AbmcState] = None,
    on_step: Optional[Callable[[AbmcState], None]] = None,
) -> Tuple[AbmcState, bool]:
    """
    Iterate abmc_step until every |s[k+1] - s[k]| < zeta with no pending
    parent switch, or K iterations have run.

    Args:
        g: Graph of the epoch.
        p: Consensus parameters.
        init: Start state; initial_state(g, p) when omitted.
        on_step: Callback invoked with every new state.

    Returns:
        (final state, converged flag)
    """
    state = init if init is not None else initial_state(g, p)
    for _ in range(p.K):
        nxt = abmc_step(state, g, p)
        if on_step is not None:
            on_step(nxt)
        delta = max((abs(nxt.s[i] - state.s[i]) for i in nxt.s), default=0.0)
        state = nxt
        if delta < p.zeta and not state.pending:
            logger.debug(f"ABMC converged after {state.k} iterations")
            return state, True
    logger.debug(f"ABMC stopped after {state.k} iterations without converging")
    return state, False


def beta_envelope(state: AbmcState) -> Tuple[float, float]:
    values = list(state.beta.values()) or [0.0]
    return min(values), max(values)


def bmc_step(
    state: Mapping[RobotId, float],
    neighbors: Mapping[RobotId, Iterable[RobotId]],
    weights: Mapping[Tuple[RobotId, RobotId], float],
    destinations: Iterable[RobotId],
    step: float = 1.0,
) -> Dict[RobotId, float]:
    """
    Baseline biased minimum consensus on a static undirected graph.

    Args:
        state: Robot -> current state.
        neighbors: Robot -> neighbor ids.
        weights: Symmetric positive weights a_ij = a_ji.
        destinations: Robots whose states stay fixed.
        step: Euler step in (0, 1].

    Returns:
        Updated states.

    Raises:
        ValueError: On asymmetric or non-positive weights, or a step outside (0, 1].
    """
    if not 0 < step <= 1:
        raise ValueError(f"step must lie in (0, 1], got {step}")
    for (i, j), w in weights.items():
        if w <= 0 or weights.get((j, i)) != w:
            raise ValueError(f"weights must be positive and symmetric, offending pair ({i}, {j})")
    fixed = set(destinations)
    updated = dict(state)
    for i, value in state.items():
        nbrs = list(neighbors.get(i, ()))
        if i in fixed or not nbrs:
            continue
        target = min(state[j] + weights[(i, j)] for j in nbrs)
        updated[i] = (1.0 - step) * value + step * target
    return updated
