# swarm_resilience/sim/dynamics.py

"""Single-integrator robots under proportional relative-position formation control."""

from typing import Mapping, Optional

import numpy as np

from swarm_resilience.models.graph import RobotId


def control_step(
    position: np.ndarray,
    received: np.ndarray,
    target_offset: np.ndarray,
    gain: float,
    dt: float,
    feedforward: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Integrate one control interval.

    The velocity is gain times the mean error between received relative
    positions (parent minus self) and their prescribed offsets, plus an
    optional feedforward velocity.

    Args:
        position: Current position (d,).
        received: Relative position of each parent, (d,) or (k, d).
        target_offset: Prescribed relative positions, same shape as received.
        gain: Proportional gain (> 0).
        dt: Control interval (s).
        feedforward: Velocity added to the feedback term.

    Returns:
        New position.

    Raises:
        ValueError: If gain <= 0 or the shapes differ.
    """
    if gain <= 0:
        raise ValueError(f"gain must be positive, got {gain}")
    received = np.atleast_2d(np.asarray(received, dtype=float))
    target_offset = np.atleast_2d(np.asarray(target_offset, dtype=float))
    if received.shape != target_offset.shape:
        raise ValueError(f"received {received.shape} and target {target_offset.shape} differ in shape")
    velocity = gain * np.mean(received - target_offset, axis=0)
    if feedforward is not None:
        velocity = velocity + feedforward
    return np.asarray(position, dtype=float) + dt * velocity


def tracking_errors(
    positions: Mapping[RobotId, np.ndarray],
    targets: Mapping[RobotId, np.ndarray],
    leader: RobotId = 1,
) -> dict:
    """Distance between each robot's position relative to the leader and its prescribed one."""
    anchor = np.asarray(positions[leader], dtype=float)
    anchor_target = np.asarray(targets[leader], dtype=float)
    return {
        i: float(np.linalg.norm((np.asarray(p, dtype=float) - anchor) - (targets[i] - anchor_target)))
        for i, p in positions.items()
    }
