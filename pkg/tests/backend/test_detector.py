"""
Test the LLR detector: window statistics, thresholds, the per-parent
routing state machine, scoring and the centralized benchmark.
"""

import numpy as np
import pytest

from swarm_resilience.detector import (
    DecisionLog,
    ParentMonitor,
    balanced_accuracy_curve,
    benchmark_models,
    calibrate_threshold,
    centralized_decide,
    decide,
    detection_threshold,
    llr,
    llr_from_statistics,
    log_likelihood_ratio,
    pooled_median,
    recovery_threshold,
    run_centralized_benchmark,
    score,
    summarize,
    summarize_reference,
)
from swarm_resilience.errors import InsufficientDataError, ScoringError
from swarm_resilience.fault import ChannelModel, Measurement
from swarm_resilience.models.scenario_config import DetectorParams

SQUARE = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]


def monitor_with_history(n_paths, params, history, llrs):
    monitor = ParentMonitor.create(4, 2, n_paths, params)
    monitor.history.extend(history)
    monitor.llr_set = dict(llrs)
    return monitor


@pytest.fixture
def params():
    return DetectorParams(window=2, history=20, dt=0.1)


class TestStatistics:
    """Test window summaries and the log-likelihood ratio."""

    def test_summarize_square(self):
        s = summarize(SQUARE, eps_cov=1e-4)
        np.testing.assert_allclose(s.mean, [1.0, 1.0])
        np.testing.assert_allclose(s.scatter, [[4.0, 0.0], [0.0, 4.0]])
        np.testing.assert_allclose(s.covariance, np.eye(2) * (4.0 / 3.0 + 1e-4))
        assert s.count == 4

    def test_summarize_measurements_uses_planar_components(self):
        window = [Measurement(np.array([x, y, 9.0])) for x, y in SQUARE]
        np.testing.assert_allclose(summarize(window).mean, [1.0, 1.0])

    def test_reference_has_regularized_zero_covariance(self):
        ref = summarize_reference(SQUARE, eps_cov=1e-3)
        np.testing.assert_allclose(ref.covariance, np.eye(2) * 1e-3)
        np.testing.assert_allclose(ref.mean, [1.0, 1.0])

    def test_single_sample_is_insufficient(self):
        with pytest.raises(InsufficientDataError):
            summarize([[0.0, 0.0]])

    def test_empty_reference_is_insufficient(self):
        with pytest.raises(InsufficientDataError):
            summarize_reference([])

    def test_identical_summaries_give_zero(self):
        s = summarize(SQUARE)
        assert llr_from_statistics(s, s) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_sample_and_statistics_forms_agree(self, seed):
        rng = np.random.default_rng(seed)
        window = rng.normal(0.2, 0.05, size=(20, 2))
        reference = summarize_reference(rng.normal(0.0, 0.03, size=(20, 2)))
        primary = summarize(window)
        assert llr(primary, window, reference) == pytest.approx(
            llr_from_statistics(primary, reference), abs=1e-9, rel=1e-9
        )

    def test_offset_raises_ratio(self):
        rng = np.random.default_rng(11)
        noise = rng.normal(0.0, 0.03, size=(20, 2))
        reference = summarize_reference(rng.normal(0.0, 0.03, size=(20, 2)))
        clean = llr_from_statistics(summarize(noise), reference)
        faulty = llr_from_statistics(summarize(noise + 0.5), reference)
        assert faulty > clean

    @pytest.mark.parametrize("seed", range(5))
    def test_common_translation_leaves_ratio_unchanged(self, seed):
        rng = np.random.default_rng(seed)
        window = rng.normal(0.1, 0.03, size=(20, 2))
        backup = rng.normal(0.0, 0.04, size=(20, 2))
        shift = rng.uniform(-10.0, 10.0, size=2)
        before = llr_from_statistics(summarize(window), summarize_reference(backup))
        after = llr_from_statistics(summarize(window + shift), summarize_reference(backup + shift))
        assert after == pytest.approx(before, rel=1e-6, abs=1e-6)


class TestThresholds:
    """Test order-statistic thresholds."""

    def test_detection_threshold(self):
        assert detection_threshold(range(1, 9)) == 10.0

    def test_recovery_threshold(self):
        assert recovery_threshold(range(1, 9), theta=0.3) == pytest.approx(3.1)
        assert recovery_threshold([9.0, 1.0, 5.0], theta=0.3) == pytest.approx(3.4, abs=1e-12)

    def test_pooled_median_has_no_interpolation(self):
        assert pooled_median([4.0, 1.0, 3.0, 2.0]) == 2.0

    @pytest.mark.parametrize("seed", range(10))
    def test_thresholds_bracket_random_populations(self, seed):
        rng = np.random.default_rng(seed)
        population = rng.exponential(100.0, size=int(rng.integers(1, 60))) - 50.0
        theta = float(rng.uniform(0.05, 0.95))
        assert detection_threshold(population) >= pooled_median(population)
        assert population.min() - 1e-9 <= recovery_threshold(population, theta) <= population.max() + 1e-9

    def test_empty_population(self):
        with pytest.raises(InsufficientDataError):
            detection_threshold([])
        with pytest.raises(InsufficientDataError):
            recovery_threshold([], 0.3)


class TestParentMonitor:
    """Test the detection and routing state machine."""

    def test_fault_switches_to_minimum_path(self, params):
        p = params.model_copy(update={"gamma_majority": 1})
        monitor = decide(monitor_with_history(2, p, [0.0] * 10, {0: 50.0, 1: 60.0}), p)
        assert monitor.lam == 0.0
        assert monitor.fault_flag
        assert monitor.use_backup
        assert monitor.route == 0
        assert monitor.t_lock == pytest.approx(0.9)
        assert monitor.switches == 1

    def test_lock_holds_route(self, params):
        p = params.model_copy(update={"gamma_majority": 1})
        monitor = decide(monitor_with_history(2, p, [0.0] * 10, {0: 50.0, 1: 60.0}), p)
        monitor.llr_set = {0: -5.0, 1: 500.0}
        decide(monitor, p)
        assert monitor.fault_flag
        assert monitor.route == 0
        assert monitor.t_lock == pytest.approx(0.8)
        assert monitor.switches == 1

    def test_flagged_path_with_largest_ratio(self, params):
        monitor = decide(monitor_with_history(3, params, [0.0] * 10, {0: -1.0, 1: 30.0, 2: 40.0}), params)
        assert monitor.fault_flag
        assert monitor.route == 2

    def test_recovery_reverts_to_primary(self, params):
        monitor = monitor_with_history(2, params, [0.0] * 10 + [100.0], {0: 0.0, 1: 0.0})
        monitor.use_backup = True
        monitor.route = 0
        decide(monitor, params)
        assert monitor.lam_recover == pytest.approx(30.0)
        assert not monitor.fault_flag
        assert not monitor.use_backup
        assert monitor.route is None
        assert monitor.t_lock == pytest.approx(0.9)

    def test_quiet_tick_only_counts_down(self, params):
        monitor = monitor_with_history(2, params, [0.0] * 10, {0: 0.0, 1: 0.0})
        monitor.t_lock = 0.5
        decide(monitor, params)
        assert not monitor.fault_flag
        assert monitor.route is None
        assert monitor.t_lock == pytest.approx(0.4)

    def test_recovery_uses_current_median(self, params):
        # The pooled median (10) sits above the recovery threshold (3); the current one (0) does not
        monitor = monitor_with_history(3, params, [10.0] * 10 + [0.0], {0: 0.0, 1: 0.0, 2: 0.0})
        monitor.use_backup = True
        monitor.route = 0
        decide(monitor, params)
        assert monitor.lam_recover == pytest.approx(3.0)
        assert not monitor.fault_flag
        assert monitor.route is None

    def test_stays_on_backup_while_current_median_is_high(self, params):
        monitor = monitor_with_history(2, params, [float(k) for k in range(11)], {0: 5.0, 1: 5.0})
        monitor.use_backup = True
        monitor.route = 1
        decide(monitor, params)
        assert monitor.lam == pytest.approx(11.0)
        assert not monitor.fault_flag
        assert monitor.route == 1

    @pytest.mark.parametrize("n_paths", [3, 4, 5, 6])
    def test_single_outlier_never_switches(self, params, n_paths):
        for outlier in range(n_paths):
            llrs = {b: 0.0 for b in range(n_paths)}
            llrs[outlier] = 1000.0
            monitor = monitor_with_history(n_paths, params, [0.0] * 10, llrs)
            for _ in range(5):
                decide(monitor, params)
                assert not monitor.fault_flag
                assert not monitor.use_backup
            assert monitor.switches == 0

    def test_flagged_tick_keeps_history(self, params):
        p = params.model_copy(update={"gamma_majority": 1})
        monitor = decide(monitor_with_history(2, p, [0.0] * 10, {0: 50.0, 1: 60.0}), p)
        assert monitor.fault_flag
        assert list(monitor.history) == [0.0] * 10

    def test_quiet_tick_extends_history(self, params):
        monitor = decide(monitor_with_history(2, params, [0.0] * 10, {0: 0.0, 1: -1.0}), params)
        assert not monitor.fault_flag
        assert list(monitor.history)[-2:] == [0.0, -1.0]

    def test_history_holds_ticks_of_every_path(self):
        p = DetectorParams(window=2, history=4)
        assert ParentMonitor.create(4, 2, 3, p).history.maxlen == 12
        assert ParentMonitor.create(4, 2, 0, p).history.maxlen == 4

    def test_no_coverage(self, params):
        monitor = decide(ParentMonitor.create(5, 3, 0, params), params)
        assert monitor.no_coverage
        assert monitor.route is None

    def test_windows_fill_before_ratios(self, params):
        monitor = ParentMonitor.create(4, 2, 2, params)
        monitor.push_primary(Measurement(np.array([0.5, 0.5])))
        for b in range(2):
            monitor.push_backup(b, Measurement(np.zeros(2)))
        assert not monitor.ready
        assert monitor.update_llrs(params) == {}

        monitor.push_primary(Measurement(np.array([0.52, 0.49])))
        for b in range(2):
            monitor.push_backup(b, Measurement(np.array([0.01, -0.01])))
        assert monitor.ready
        assert sorted(monitor.update_llrs(params)) == [0, 1]

    def test_decision_log(self, params):
        p = params.model_copy(update={"gamma_majority": 1})
        monitor = decide(monitor_with_history(2, p, [0.0] * 10, {0: 50.0, 1: 60.0}), p)
        log = DecisionLog()
        log.record(7, monitor)
        frame = log.to_dataframe()
        assert list(frame.columns) == [
            "tick", "robot", "parent", "llrs", "lambda", "lambda_recover", "fault_flag", "route", "t_lock",
        ]
        row = frame.iloc[0]
        assert row["llrs"] == "0:50.000000;1:60.000000"
        assert row["route"] == "backup:0"


class TestScoring:
    """Test accuracy and false positive rate."""

    def test_single_series(self):
        result = score([True, False, True, False], [True, True, False, False])
        assert result.accuracy == 0.5
        assert result.false_positive_rate == 0.5
        assert result.fault_ticks == 2
        assert result.clean_ticks == 2

    def test_rates_average_over_links(self):
        decisions = {(4, 2): [True, True], (5, 3): [False, False]}
        truth = {(4, 2): [True, True], (5, 3): [True, False]}
        result = score(decisions, truth)
        assert result.accuracy == pytest.approx(0.5)
        assert result.false_positive_rate == 0.0

    def test_no_faults(self):
        result = score([False, True], [False, False])
        assert result.accuracy == 1.0
        assert result.false_positive_rate == 0.5

    def test_mismatched_links(self):
        with pytest.raises(ScoringError):
            score({(4, 2): [True]}, {(5, 3): [True]})

    def test_mismatched_lengths(self):
        with pytest.raises(ScoringError):
            score([True, False], [True])


class TestCentralized:
    """Test the centralized likelihood-ratio benchmark."""

    @pytest.fixture
    def models(self):
        return benchmark_models((0.5, 0.5), ChannelModel(p_e=0.02))

    def test_models(self, models):
        f0, f1 = models
        np.testing.assert_allclose(f0.mean, [0.0, 0.0])
        np.testing.assert_allclose(f1.mean, [0.5, 0.5])
        np.testing.assert_allclose(f0.covariance, np.eye(2) * 0.0009)

    def test_ratio_is_antisymmetric(self, models):
        f0, f1 = models
        at_fault = log_likelihood_ratio(f1.mean, f0, f1)
        at_clean = log_likelihood_ratio(f0.mean, f0, f1)
        assert at_fault > 0
        assert at_fault == pytest.approx(-at_clean)

    def test_decide(self, models):
        f0, f1 = models
        assert centralized_decide([[0.5, 0.5]], f0, f1, 0.0)
        assert not centralized_decide([[0.0, 0.0]], f0, f1, 0.0)

    def test_balanced_accuracy_curve(self):
        curve = balanced_accuracy_curve(
            np.array([0.0, 1.0, 2.0, 3.0]),
            np.array([False, False, True, True]),
            np.array([-1.0, 1.5, 5.0]),
        )
        np.testing.assert_allclose(curve, [0.5, 1.0, 0.5])

    def test_calibration_separates_distant_models(self, models):
        f0, f1 = models
        result = calibrate_threshold(f0, f1, np.random.default_rng(0))
        assert result.balanced_accuracy == pytest.approx(1.0)
        assert result.true_positive_rate == pytest.approx(1.0)

    def test_benchmark_scores(self):
        result = run_centralized_benchmark(
            0.3, ChannelModel(p_e=0.02), (0.5, 0.5), 2000, np.random.default_rng(1)
        )
        assert result.accuracy > 0.99
        assert result.false_positive_rate < 0.01

    def test_benchmark_without_faults(self):
        result = run_centralized_benchmark(
            0.0, ChannelModel(p_e=0.02), (0.5, 0.5), 500, np.random.default_rng(2)
        )
        assert result.accuracy == 1.0
        assert result.fault_ticks == 0
