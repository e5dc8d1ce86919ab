"""Configuration loading, Monte Carlo sweeps, reports and the CLI."""

from swarm_resilience.harness.reports import emit_reports, emit_trial_reports
from swarm_resilience.harness.sweep import (
    aggregate,
    apply_overrides,
    cell_key,
    derive_seed,
    expand_cells,
    parse_config,
    run_sweep,
)

__all__ = [
    "emit_reports",
    "emit_trial_reports",
    "aggregate",
    "apply_overrides",
    "cell_key",
    "derive_seed",
    "expand_cells",
    "parse_config",
    "run_sweep",
]
