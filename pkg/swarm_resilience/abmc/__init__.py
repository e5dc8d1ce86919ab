"""Backup-path consensus, path extraction and the multiplex backup layer."""

from swarm_resilience.abmc.oracle import bellman_oracle
from swarm_resilience.abmc.paths import (
    BackupPath,
    BackupPathSet,
    MultiplexLayer,
    backtrack,
    build_backup_layer,
    extract_backup_paths,
    write_backup_layer_csv,
)
from swarm_resilience.abmc.protocol import (
    AbmcState,
    CandidateTable,
    abmc_step,
    beta_envelope,
    bias,
    bmc_step,
    candidate_parents,
    freeze_table,
    initial_state,
    run_to_convergence,
)

__all__ = [
    "bellman_oracle",
    "BackupPath",
    "BackupPathSet",
    "MultiplexLayer",
    "backtrack",
    "build_backup_layer",
    "extract_backup_paths",
    "write_backup_layer_csv",
    "AbmcState",
    "CandidateTable",
    "abmc_step",
    "beta_envelope",
    "bias",
    "bmc_step",
    "candidate_parents",
    "freeze_table",
    "initial_state",
    "run_to_convergence",
]
