"""Intermittent offset faults and channel noise."""

from swarm_resilience.fault.channel import ChannelModel, Measurement, apply_channel
from swarm_resilience.fault.process import FaultProcess, FaultSchedule, advance_fault, corrupt

__all__ = [
    "ChannelModel",
    "Measurement",
    "apply_channel",
    "FaultProcess",
    "FaultSchedule",
    "advance_fault",
    "corrupt",
]
