# swarm_resilience/errors.py

"""
Exception hierarchy for the swarm resilience toolkit.

Classes:
    SwarmResilienceError: Base class for all library errors.
    InvalidSizeError: Requested swarm size cannot form a graph.
    TopologyError: Graph structure is cyclic or otherwise malformed.
    DegenerateSwarmError: Too few robots survive a removal.
    UnsupportedScenarioError: Scenario outside the modelled assumptions.
    UnknownRobotError: Robot id not present in the graph.
    BacktrackCycleError: Backup-parent backtracking did not reach the leader.
    InsufficientDataError: Not enough samples for a statistic.
    NumericError: Covariance or likelihood evaluation broke down.
    EpochMismatchError: Routing state refers to a stale backup layer.
    ScoringError: Decision and truth logs do not line up.
    ConfigError: Scenario or sweep configuration is invalid.
"""


class SwarmResilienceError(Exception):
    """Base exception for swarm resilience errors."""


class InvalidSizeError(SwarmResilienceError, ValueError):
    pass


class TopologyError(SwarmResilienceError):
    pass


class DegenerateSwarmError(SwarmResilienceError):
    pass


class UnsupportedScenarioError(SwarmResilienceError):
    pass


class UnknownRobotError(SwarmResilienceError, LookupError):
    pass


class BacktrackCycleError(SwarmResilienceError):
    """Raised when backtracking exceeds the robot count (consensus not converged)."""


class InsufficientDataError(SwarmResilienceError, ValueError):
    pass


class NumericError(SwarmResilienceError, ArithmeticError):
    """Raised when a covariance stays singular after regularization."""


class EpochMismatchError(SwarmResilienceError):
    """Raised when a route refers to a backup layer from another epoch."""


class ScoringError(SwarmResilienceError, ValueError):
    pass


class ConfigError(SwarmResilienceError, ValueError):
    """Raised for invalid scenario or sweep configuration."""
