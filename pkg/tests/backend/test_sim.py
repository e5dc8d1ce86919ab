"""
Test formation dynamics, measurement routing and whole trials.
"""

import dataclasses

import numpy as np
import pandas as pd
import pytest

from swarm_resilience.abmc import build_backup_layer
from swarm_resilience.detector import ParentMonitor
from swarm_resilience.errors import ConfigError, EpochMismatchError
from swarm_resilience.fault import Measurement
from swarm_resilience.models.metrics import TrialMetrics
from swarm_resilience.models.scenario_config import AbmcParams, DetectorParams
from swarm_resilience.sim import (
    MeasurementBus,
    breakdown_accounting,
    control_step,
    fault_links,
    route_measurement,
    run_trial,
    tracking_errors,
)
from tests.fixtures import eight_robot_graph, small_scenario

ALL_FOLLOWERS = [3, 4, 5, 6, 7, 8]


class TestDynamics:
    """Test the control law and tracking errors."""

    def test_step_towards_target(self):
        new = control_step(np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.5, 0.0]), 0.8, 0.1)
        np.testing.assert_allclose(new, [0.04, 0.0])

    def test_feedforward(self):
        new = control_step(
            np.zeros(2), np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]]), 0.8, 0.1, feedforward=np.array([0.0, 0.1])
        )
        np.testing.assert_allclose(new, [0.0, 0.01])

    def test_geometric_decay(self):
        x = np.array([1.0, -2.0])
        start = x.copy()
        for _ in range(25):
            x = control_step(x, -x, np.zeros(2), 0.8, 0.1)
        np.testing.assert_allclose(x, start * 0.92**25)

    def test_averages_over_parents(self):
        received = np.array([[1.0, 0.0], [0.0, 1.0]])
        new = control_step(np.zeros(2), received, np.zeros((2, 2)), 1.0, 0.1)
        np.testing.assert_allclose(new, [0.05, 0.05])

    def test_rejects_nonpositive_gain(self):
        with pytest.raises(ValueError):
            control_step(np.zeros(2), np.zeros(2), np.zeros(2), 0.0, 0.1)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            control_step(np.zeros(2), np.zeros((2, 2)), np.zeros(2), 0.8, 0.1)

    def test_tracking_errors_relative_to_leader(self):
        errors = tracking_errors(
            {1: np.array([1.0, 1.0]), 2: np.array([2.0, 1.0])},
            {1: np.array([0.0, 0.0]), 2: np.array([1.0, 0.5])},
        )
        assert errors[1] == 0.0
        assert errors[2] == pytest.approx(0.5)


class TestRouting:
    """Test delivery over the primary link or a backup path."""

    EDGE = (7, 5)

    @pytest.fixture
    def setup(self):
        g = eight_robot_graph()
        layer = build_backup_layer(g, AbmcParams())
        monitor = ParentMonitor.create(7, 5, len(layer.paths[7]), DetectorParams())
        bus = MeasurementBus(
            3,
            primary={self.EDGE: Measurement(np.array([1.0, 1.0]), source="primary")},
            backup={
                (self.EDGE, b): Measurement(np.array([float(b), 0.0]), source=f"backup:{b}")
                for b in range(len(layer.paths[7]))
            },
        )
        return g, layer, {self.EDGE: monitor}, bus

    def test_primary_route(self, setup):
        g, layer, monitors, bus = setup
        assert route_measurement(g, layer, monitors, self.EDGE, 3, bus).source == "primary"

    def test_backup_route(self, setup):
        g, layer, monitors, bus = setup
        monitors[self.EDGE].route = 1
        assert route_measurement(g, layer, monitors, self.EDGE, 3, bus).source == "backup:1"

    def test_mitigation_disabled(self, setup):
        g, layer, monitors, bus = setup
        monitors[self.EDGE].route = 1
        delivered = route_measurement(g, layer, monitors, self.EDGE, 3, bus, mitigation_enabled=False)
        assert delivered.source == "primary"

    def test_unmonitored_edge(self, setup):
        g, layer, _, bus = setup
        assert route_measurement(g, layer, {}, self.EDGE, 3, bus).source == "primary"

    def test_unknown_route_index(self, setup):
        g, layer, monitors, bus = setup
        monitors[self.EDGE].route = 9
        with pytest.raises(EpochMismatchError):
            route_measurement(g, layer, monitors, self.EDGE, 3, bus)

    def test_stale_layer(self, setup):
        g, layer, monitors, bus = setup
        with pytest.raises(EpochMismatchError):
            route_measurement(g, dataclasses.replace(layer, epoch=1), monitors, self.EDGE, 3, bus)

    def test_wrong_tick(self, setup):
        g, layer, monitors, bus = setup
        with pytest.raises(ValueError):
            route_measurement(g, layer, monitors, self.EDGE, 4, bus)


class TestFaultLinks:
    """Test the selection of fault-carrying links."""

    def test_two_non_leader_parents(self):
        links = fault_links(small_scenario(fault={"robots": [4, 7]}), eight_robot_graph())
        assert links == [(4, 2), (4, 3), (7, 5), (7, 6)]

    def test_leader_links_never_faulty(self):
        assert fault_links(small_scenario(fault={"robots": [5]}), eight_robot_graph()) == [(5, 3)]

    def test_single_faulty_parent(self):
        cfg = small_scenario(fault={"robots": [7], "faulty_parents": 1})
        assert fault_links(cfg, eight_robot_graph()) == [(7, 5)]

    def test_default_targets_every_follower(self):
        links = fault_links(small_scenario(), eight_robot_graph())
        assert {i for i, _ in links} == {3, 4, 5, 6, 7, 8}
        assert (3, 2) in links

    def test_default_targets_limited_to_covered_followers(self):
        cfg = small_scenario()
        g = eight_robot_graph()
        layer = build_backup_layer(g, cfg.abmc)
        links = fault_links(cfg, g, layer)
        assert {i for i, _ in links} == {i for i in g.followers() if layer.covers(i)}
        # Robot 3 only has the leader and first follower below it
        assert (3, 2) not in links

    def test_explicit_targets_ignore_coverage(self):
        cfg = small_scenario(fault={"robots": [3]})
        g = eight_robot_graph()
        assert fault_links(cfg, g, build_backup_layer(g, cfg.abmc)) == [(3, 2)]

    def test_first_follower_rejected(self):
        with pytest.raises(ConfigError):
            fault_links(small_scenario(fault={"robots": [2]}), eight_robot_graph())


class TestBreakdownAccounting:
    """Test irrecoverable-robot bookkeeping."""

    @pytest.fixture
    def metrics(self):
        cumulative = np.array([[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 3.0, 0.5]])
        return TrialMetrics(
            times=np.array([0.1, 0.2, 0.3]),
            robots=(1, 2, 3),
            errors=np.zeros((3, 3)),
            cumulative_errors=cumulative,
            mean_error=np.zeros(3),
            fraction=np.ones(3),
            broken={},
            broken_at={},
        )

    def test_flags_and_fraction(self, metrics):
        result = breakdown_accounting(metrics, 1.0)
        assert result.broken == {1: False, 2: True, 3: False}
        assert result.broken_at[2] == pytest.approx(0.2)
        assert result.broken_at[3] is None
        np.testing.assert_allclose(result.fraction, [1.0, 2 / 3, 2 / 3])

    def test_fraction_never_increases(self, metrics):
        fraction = breakdown_accounting(metrics, 0.4).fraction
        assert np.all(np.diff(fraction) <= 0)

    def test_rejects_nonpositive_threshold(self, metrics):
        with pytest.raises(ValueError):
            breakdown_accounting(metrics, 0.0)


class TestRunTrial:
    """Test whole simulated trials."""

    def test_noiseless_fault_free_formation_holds(self):
        metrics = run_trial(small_scenario(channel={"p_e": 0.0}, fault={"p_f": 0.0}))
        assert metrics.ticks == 40
        np.testing.assert_allclose(metrics.times[:2], [0.1, 0.2])
        np.testing.assert_allclose(metrics.mean_error, 0.0, atol=1e-9)
        assert metrics.final_fraction == 1.0
        assert metrics.accuracy == 1.0
        assert metrics.fault_ticks == 0

    def test_same_seed_same_result(self):
        cfg = small_scenario(fault={"p_f": 0.3})
        a, b = run_trial(cfg), run_trial(cfg)
        np.testing.assert_array_equal(a.errors, b.errors)
        pd.testing.assert_frame_equal(a.faults, b.faults)
        pd.testing.assert_frame_equal(a.decisions, b.decisions)
        assert a.accuracy == b.accuracy

    def test_paired_runs_share_fault_schedule(self):
        fault = {"p_f": 0.3, "robots": ALL_FOLLOWERS}
        on = run_trial(small_scenario(fault=fault, mitigation_enabled=True))
        off = run_trial(small_scenario(fault=fault, mitigation_enabled=False))
        pd.testing.assert_frame_equal(on.faults, off.faults)
        assert on.faults["active"].any()

    def test_faults_wait_for_warmup(self):
        # One window of 5 to fill plus a baseline of 5 ticks
        metrics = run_trial(small_scenario(fault={"p_f": 1.0, "robots": ALL_FOLLOWERS}))
        early = metrics.faults[metrics.faults["tick"] < 10]
        late = metrics.faults[metrics.faults["tick"] >= 10]
        assert not early.empty and not late.empty
        assert not early["active"].any()
        assert late["active"].all()

    def test_fault_ticks_count_contaminated_windows(self):
        cfg = small_scenario(fault={"p_f": 0.3, "robots": ALL_FOLLOWERS})
        params = cfg.detector_params()
        metrics = run_trial(cfg)
        scored = contaminated = 0
        for _, link in metrics.faults.groupby(["robot", "parent"]):
            active = link.sort_values("tick")["active"].to_numpy()
            for tick in range(params.warmup_ticks, len(active)):
                scored += 1
                contaminated += bool(active[max(0, tick - params.window + 1) : tick + 1].any())
        assert contaminated > 0
        assert metrics.fault_ticks == contaminated
        assert metrics.clean_ticks == scored - contaminated

    def test_leader_path_ignores_faults(self):
        cfg = small_scenario(fault={"p_f": 0.0})
        quiet = run_trial(cfg)
        faulty = run_trial(
            small_scenario(fault={"p_f": 0.6, "robots": ALL_FOLLOWERS}, mitigation_enabled=False)
        )
        np.testing.assert_array_equal(quiet.leader_path, faulty.leader_path)
        expected = np.outer(np.arange(1, cfg.ticks + 1) * cfg.dt, cfg.leader_velocity())
        np.testing.assert_allclose(quiet.leader_path, expected, atol=1e-12)

    def test_logs_optional(self):
        metrics = run_trial(small_scenario(), record_logs=False)
        assert metrics.decisions is None
        assert metrics.faults is None

    def test_three_dimensional(self):
        metrics = run_trial(small_scenario(d=3, channel={"p_e": 0.0}))
        assert metrics.errors.shape == (40, 8)
        np.testing.assert_allclose(metrics.mean_error, 0.0, atol=1e-9)

    def test_failed_robot_errors_decay(self):
        metrics = run_trial(small_scenario(failed_robots=[4], duration=20.0, channel={"p_e": 0.0}))
        assert len(metrics.robots) == 7
        assert metrics.mean_error[-1] <= 0.1 * metrics.mean_error[0] + 1e-9

    def test_hop_pairs_cover_layer(self):
        metrics = run_trial(small_scenario())
        assert sum(metrics.hop_histogram.values()) == len(metrics.hop_pairs)
        for _, primary, backup in metrics.hop_pairs:
            assert primary >= 1
            assert backup >= 1
