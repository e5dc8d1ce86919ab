# swarm_resilience/fault/channel.py

"""
Relative-position measurements and per-hop channel noise.

A binary-symmetric channel with bit-error probability p_e is modelled as
additive zero-mean Gaussian noise with variance sigma_e^2 = c * p_e per hop;
independent hops add their variances.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from swarm_resilience.models.scenario_config import ChannelMeta


@dataclass(frozen=True, eq=False)
class Measurement:
    """
    Relative position q_ij of parent j seen from robot i.

    Attributes:
        value: Relative position vector (m).
        timestamp: Sample time (s).
        source: Path the value travelled ("primary" or "backup:<b>").
    """

    value: np.ndarray
    timestamp: float = 0.0
    source: str = "primary"

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float)
        if not np.all(np.isfinite(value)):
            raise ValueError(f"Measurement components must be finite, got {value}")
        object.__setattr__(self, "value", value)

    def shifted(self, delta: np.ndarray, source: Optional[str] = None) -> "Measurement":
        return replace(self, value=self.value + delta, source=source or self.source)


@dataclass(frozen=True)
class ChannelModel:
    p_e: float = 0.02
    noise_coefficient: float = 0.04

    def __post_init__(self):
        if not 0 <= self.p_e <= 1:
            raise ValueError(f"p_e must lie in [0, 1], got {self.p_e}")
        if self.noise_coefficient < 0:
            raise ValueError("noise_coefficient must be nonnegative")

    @property
    def sigma_e_sq(self) -> float:
        """Per-hop noise variance (m^2)."""
        return self.noise_coefficient * self.p_e

    @classmethod
    def from_meta(cls, meta: ChannelMeta) -> "ChannelModel":
        return cls(p_e=meta.p_e, noise_coefficient=meta.noise_coefficient)


def apply_channel(q: Measurement, ch: ChannelModel, hops: int, rng: np.random.Generator) -> Measurement:
    """
    Add channel noise accumulated over the given number of hops.

    Args:
        q: Measurement entering the channel.
        ch: Channel model.
        hops: Hop count of the path (>= 1).
        rng: Generator of this measurement stream.

    Returns:
        Measurement with per-axis noise variance hops * sigma_e^2; q itself
        when the channel is noiseless (no random draw is consumed).

    Raises:
        ValueError: If hops < 1.
    """
    if hops < 1:
        raise ValueError(f"hops must be at least 1, got {hops}")
    variance = hops * ch.sigma_e_sq
    if variance == 0:
        return q
    noise = rng.normal(0.0, np.sqrt(variance), size=q.value.shape)
    return q.shifted(noise)
