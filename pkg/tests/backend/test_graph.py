"""
Test graph construction, validation, reconfiguration and serialization.

These tests validate:
- Random HHC construction and its structural invariants
- Violation reporting of the validator
- Hierarchy recomputation against a longest-path oracle
- Robot removal with role reassignment
- Range queries against a brute-force scan
- The graph text format against a golden file
"""

import dataclasses

import networkx as nx
import numpy as np
import pytest

from swarm_resilience.errors import (
    DegenerateSwarmError,
    InvalidSizeError,
    TopologyError,
    UnknownRobotError,
    UnsupportedScenarioError,
)
from swarm_resilience.graph import (
    build_random_hhc,
    dumps_graph,
    loads_graph,
    neighbors_in_range,
    read_graph,
    recompute_hierarchy,
    remove_and_reconfigure,
    validate_hhc,
    write_graph,
)
from tests.fixtures import eight_robot_graph, make_graph
from tests.helpers import get_sample_data_path


@pytest.fixture
def graph():
    return eight_robot_graph()


@pytest.fixture
def random_graph():
    return build_random_hhc(20, rng=np.random.default_rng(7))


class TestBuildRandomHhc:
    """Test random HHC construction."""

    def test_two_robot_kernel(self):
        g = build_random_hhc(2, rng=np.random.default_rng(0))
        assert g.robots == [1, 2]
        assert g.hierarchy == {1: 0, 2: 1}
        assert g.parents[2] == (1,)

    def test_rejects_too_small(self):
        with pytest.raises(InvalidSizeError):
            build_random_hhc(1)

    @pytest.mark.parametrize("seed", range(10))
    def test_output_is_valid(self, seed):
        g = build_random_hhc(20, rng=np.random.default_rng(seed))
        report = validate_hhc(g)
        assert report.valid, str(report)
        assert g.n == 20

    @pytest.mark.parametrize("n", [20, 50])
    def test_growth_never_stalls(self, n):
        # Seed 19 at n=20 used to fill every open robot on a single level
        for seed in range(200):
            g = build_random_hhc(n, rng=np.random.default_rng(seed))
            report = validate_hhc(g)
            assert report.valid, f"seed {seed}: {report}"
            assert g.n == n

    def test_open_robots_keep_two_levels(self):
        # Early robots fill the leader and first follower; growth must still finish
        g = build_random_hhc(20, rng=np.random.default_rng(19))
        assert validate_hhc(g).valid
        assert max(g.hierarchy.values()) >= 3

    def test_exhausted_restarts_raise(self):
        with pytest.raises(TopologyError):
            build_random_hhc(10, rng=np.random.default_rng(0), min_separation=5.0, max_attempts=5, max_restarts=2)

    def test_child_caps_respected(self, random_graph):
        assert random_graph.out_degree(1) <= 4
        assert all(random_graph.out_degree(j) <= 3 for j in random_graph.robots if j != 1)

    def test_parents_within_range(self, random_graph):
        for child, parent in random_graph.edges:
            assert random_graph.distance(child, parent) <= 2.0 + 1e-9

    def test_three_dimensional(self):
        g = build_random_hhc(12, rng=np.random.default_rng(4), d=3)
        assert g.dim == 3
        assert validate_hhc(g).valid

    def test_same_seed_same_graph(self):
        a = build_random_hhc(15, rng=np.random.default_rng(11))
        b = build_random_hhc(15, rng=np.random.default_rng(11))
        assert dumps_graph(a) == dumps_graph(b)


class TestValidateHhc:
    """Test HHC validation reports."""

    def test_valid_graph_has_empty_report(self, graph):
        report = validate_hhc(graph)
        assert report.valid
        assert report.violations == []

    def test_single_parent_follower(self, graph):
        parents = dict(graph.parents)
        parents[4] = (3,)
        broken = dataclasses.replace(graph, parents=parents)
        assert "parent-count" in validate_hhc(broken).kinds()

    def test_wrong_hierarchy_level(self, graph):
        hierarchy = dict(graph.hierarchy)
        hierarchy[6] = 7
        report = validate_hhc(dataclasses.replace(graph, hierarchy=hierarchy))
        assert "hierarchy" in report.kinds()

    def test_parents_on_same_level(self, graph):
        parents = dict(graph.parents)
        parents[7] = (4, 5)
        report = validate_hhc(dataclasses.replace(graph, parents=parents))
        assert "parent-levels" in report.kinds()

    def test_cycle_detected(self, graph):
        parents = dict(graph.parents)
        parents[3] = (1, 4)
        report = validate_hhc(dataclasses.replace(graph, parents=parents))
        assert "cycle" in report.kinds()

    def test_first_follower_rule(self, graph):
        parents = dict(graph.parents)
        parents[2] = (1, 3)
        assert "first-follower" in validate_hhc(dataclasses.replace(graph, parents=parents)).kinds()


class TestRecomputeHierarchy:
    """Test hierarchy recomputation."""

    def test_chain(self):
        g = make_graph({1: (), 2: (1,), 3: (1, 2)}, {1: (0, 0), 2: (1, 0), 3: (0, 1)})
        assert g.hierarchy == {1: 0, 2: 1, 3: 2}

    def test_eight_robot_levels(self, graph):
        assert graph.hierarchy == {1: 0, 2: 1, 3: 2, 4: 3, 5: 3, 6: 4, 7: 5, 8: 5}

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_longest_path_oracle(self, seed):
        g = build_random_hhc(25, rng=np.random.default_rng(100 + seed))
        shuffled = dataclasses.replace(g, hierarchy={i: 0 for i in g.robots})
        levels = recompute_hierarchy(shuffled).hierarchy
        dg = g.to_networkx()
        assert levels[g.leader] == 0
        for i in g.robots:
            if i == g.leader:
                continue
            longest = max(
                (len(path) - 1 for path in nx.all_simple_paths(dg, i, g.leader)),
                default=0,
            )
            assert levels[i] == longest

    def test_cycle_raises(self, graph):
        parents = dict(graph.parents)
        parents[3] = (1, 4)
        with pytest.raises(TopologyError):
            recompute_hierarchy(dataclasses.replace(graph, parents=parents))


class TestRemoveAndReconfigure:
    """Test robot removal with role reassignment."""

    def test_nothing_failed_is_identity(self, graph):
        assert remove_and_reconfigure(graph, set()) is graph

    def test_remove_one_robot(self, graph):
        g = remove_and_reconfigure(graph, {3})
        assert validate_hhc(g).valid
        assert g.n == 7
        assert 3 not in g.parents
        assert g.epoch.index == graph.epoch.index + 1
        assert g.leader == 1
        assert set(g.roles.values()) == {1, 2, 3, 4, 5, 6, 7}

    def test_nearest_later_role_fills_vacancy(self, graph):
        g = remove_and_reconfigure(graph, {3})
        # Robots 6 and 7 are both 0.943 m from role 3; the lower id wins
        assert g.role_of(6) == 3
        np.testing.assert_allclose(g.position(6), graph.position(3))

    def test_vacancies_cascade_in_role_order(self, graph):
        g = remove_and_reconfigure(graph, {3})
        # Role 6 ties between robots 7 and 8 at 1 m; robot 8 then takes role 7
        assert {i: g.role_of(i) for i in (6, 7, 8)} == {6: 3, 7: 6, 8: 7}
        assert g.role_of(4) == 4
        assert g.role_of(5) == 5

    def test_leader_failure_unsupported(self, graph):
        with pytest.raises(UnsupportedScenarioError):
            remove_and_reconfigure(graph, {1})

    def test_too_few_survivors(self, graph):
        with pytest.raises(DegenerateSwarmError):
            remove_and_reconfigure(graph, {2, 3, 4, 5, 6, 7, 8})

    def test_unknown_robot(self, graph):
        with pytest.raises(UnknownRobotError):
            remove_and_reconfigure(graph, {42})

    @pytest.mark.parametrize("seed", range(20))
    def test_random_removals_stay_valid(self, seed):
        rng = np.random.default_rng(seed)
        g = build_random_hhc(20, rng=rng)
        count = int(rng.integers(5, 10))
        failed = set(int(i) for i in rng.choice(np.arange(2, 21), size=count, replace=False))
        reconfigured = remove_and_reconfigure(g, failed)
        report = validate_hhc(reconfigured)
        assert report.valid, str(report)
        assert reconfigured.n == 20 - count


class TestNeighborsInRange:
    """Test the range query."""

    def test_small_radius_is_empty(self, graph):
        assert neighbors_in_range(graph, 1, 0.1) == set()

    def test_large_radius_is_everyone_else(self, graph):
        assert neighbors_in_range(graph, 1, 100.0) == set(graph.robots) - {1}

    def test_matches_brute_force(self, random_graph):
        for i in random_graph.robots:
            expected = {
                j for j in random_graph.robots
                if j != i and random_graph.distance(i, j) <= 1.5
            }
            assert neighbors_in_range(random_graph, i, 1.5) == expected

    def test_unknown_robot(self, graph):
        with pytest.raises(UnknownRobotError):
            neighbors_in_range(graph, 99, 1.0)

    def test_nonpositive_range(self, graph):
        with pytest.raises(ValueError):
            neighbors_in_range(graph, 1, 0.0)


class TestSerialization:
    """Test the graph text format."""

    def test_matches_golden_file(self, graph):
        golden = get_sample_data_path("eight_robot_graph.txt").read_text(encoding="utf-8")
        assert dumps_graph(graph) == golden

    def test_loads_golden_file(self):
        g = read_graph(get_sample_data_path("eight_robot_graph.txt"))
        assert validate_hhc(g).valid
        assert g.parents[7] == (5, 6)
        assert g.roles is None

    def test_reconfigured_graph_keeps_roles(self, graph, tmp_path):
        g = remove_and_reconfigure(graph, {3})
        path = write_graph(g, tmp_path / "graph.txt")
        loaded = read_graph(path)
        assert loaded.role_of(6) == 3
        assert loaded.epoch.index == 1
        assert dumps_graph(loaded) == dumps_graph(g)

    def test_malformed_header(self):
        with pytest.raises(TopologyError):
            loads_graph("not a graph\n")

    def test_malformed_record(self):
        text = "# swarm-resilience graph v1\n# leader=1 first_follower=2 epoch=0 start_time=0.000000\n1;;0,0\n"
        with pytest.raises(TopologyError):
            loads_graph(text)
