"""
Monte Carlo acceptance runs: backup path quality, reconfiguration,
detection rates and mitigation under a fault burst.

These are slow and excluded by default; run them with `pytest -m slow`.
"""

import numpy as np
import pytest

from swarm_resilience.abmc import build_backup_layer
from swarm_resilience.graph import build_random_hhc, remove_and_reconfigure
from swarm_resilience.models.scenario_config import AbmcParams, ScenarioConfig
from swarm_resilience.sim import run_trial

pytestmark = pytest.mark.slow

TRIALS = 20


def hop_pairs(g, layer):
    primary = g.primary_hops()
    return [(primary[i], paths.min_path.hops) for i, paths in layer.paths.items()]


def detection_config(p_f, seed):
    return ScenarioConfig.from_dict(
        {
            "n": 20,
            "seed": seed,
            "duration": 30.0,
            "fault": {"p_f": p_f, "faulty_parents": 2},
            "channel": {"p_e": 0.02},
        }
    )


def mean_rates(p_f):
    runs = [run_trial(detection_config(p_f, seed), record_logs=False) for seed in range(1, TRIALS + 1)]
    return np.mean([m.accuracy for m in runs]), np.mean([m.false_positive_rate for m in runs])


def test_backup_paths_stay_short():
    params = AbmcParams(eta=0.1, kappa_d=6, r=2.0)
    pairs = []
    for seed in range(TRIALS):
        g = build_random_hhc(20, rng=np.random.default_rng(seed))
        pairs += hop_pairs(g, build_backup_layer(g, params))
    relevant = [(p, b) for p, b in pairs if p in (2, 3)]
    assert relevant
    within_one = sum(1 for p, b in relevant if b <= p + 1) / len(relevant)
    assert within_one >= 0.85


def test_reconfigured_graphs_keep_backup_paths():
    params = AbmcParams()
    two_hop_backups = []
    for seed in range(TRIALS):
        rng = np.random.default_rng(1000 + seed)
        g = build_random_hhc(20, rng=rng)
        count = int(rng.integers(5, 10))
        failed = {int(i) for i in rng.choice(np.arange(2, 21), size=count, replace=False)}
        reconfigured = remove_and_reconfigure(g, failed)
        layer = build_backup_layer(reconfigured, params)
        for i in reconfigured.followers():
            if layer.state.table.candidates.get(i):
                assert layer.covers(i), f"seed {seed}: robot {i} has candidates but no backup path"
        two_hop_backups += [b for p, b in hop_pairs(reconfigured, layer) if p == 2]
    assert np.mean(two_hop_backups) <= 2.5


def test_detection_accuracy_rises_with_fault_rate():
    accuracies = [mean_rates(p_f)[0] for p_f in (0.05, 0.15, 0.30, 0.45)]
    assert accuracies[2] >= 0.85
    drops = [prev - nxt for prev, nxt in zip(accuracies, accuracies[1:]) if nxt < prev]
    assert len(drops) <= 1
    assert all(drop <= 0.02 for drop in drops)


def test_false_positive_rate_at_high_fault_rate():
    _, fpr = mean_rates(0.35)
    assert fpr <= 0.10


def test_mitigation_holds_formation_through_burst():
    base = {
        "n": 50,
        "duration": 60.0,
        "fault": {"p_f": 0.1},
        "burst": {"p_f": 0.35, "t_start": 30.0, "t_end": 50.0},
    }
    tick_30s = 299
    tick_10s = 99
    on_fractions, off_fractions = [], []
    for seed in range(1, TRIALS + 1):
        on = run_trial(ScenarioConfig.from_dict({**base, "seed": seed, "mitigation_enabled": True}), record_logs=False)
        off = run_trial(ScenarioConfig.from_dict({**base, "seed": seed, "mitigation_enabled": False}), record_logs=False)
        on_fractions.append(on.fraction[tick_30s])
        off_fractions.append(off.fraction[tick_30s])
        assert np.all(on.mean_error[tick_10s:] <= off.mean_error[tick_10s:] + 1e-9), f"seed {seed}"
    assert np.mean(on_fractions) >= 0.9
    assert np.mean(off_fractions) <= 0.2
