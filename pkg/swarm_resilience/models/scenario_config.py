# swarm_resilience/models/scenario_config.py

"""
Scenario and sweep configuration models with YAML utilities.

This module defines Pydantic models for every tunable of the toolkit: graph
construction, backup-path consensus, fault injection, channel noise, the
detector, and the trial/sweep drivers. All models reject unknown keys.

Classes:
    ConfigModel: Base model with strict keys and YAML import/export.
    GraphMeta: Random HHC construction settings.
    AbmcParams: Backup-path consensus parameters.
    FaultMeta: Intermittent offset fault settings.
    ChannelMeta: Per-hop channel noise settings.
    DetectorParams: LLR detector and routing state machine settings.
    BurstMeta: Temporary raised fault probability.
    ScenarioConfig: Single-trial configuration.
    SweepAxis: One swept parameter.
    SweepSpec: Monte Carlo sweep over a parameter grid.

Functions:
    format_validation_error: Flatten a pydantic error into "key.path: message" lines.
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from swarm_resilience.errors import ConfigError

SCHEMA_VERSION = 1
AXIS_NAMES = ("x", "y", "z")

ModelT = TypeVar("ModelT", bound="ConfigModel")


def format_validation_error(error: ValidationError) -> str:
    lines = []
    for err in error.errors():
        loc = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
        lines.append(f"{loc}: {err.get('msg', 'invalid value')}")
    return "; ".join(lines)


class ConfigModel(BaseModel):
    """Base for configuration models: unknown keys rejected, YAML round-trip."""

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_dict(cls: Type[ModelT], data: Dict[str, Any]) -> ModelT:
        """Create a model from a dictionary.

        Args:
            data: Dictionary containing the configuration

        Returns:
            Validated model instance

        Raises:
            ConfigError: If data is invalid; the message names each key path
        """
        if not isinstance(data, dict):
            raise ConfigError(f"Invalid {cls.__name__}: expected a mapping, got {type(data).__name__}")
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid {cls.__name__}: {format_validation_error(e)}") from e

    @classmethod
    def from_yaml(cls: Type[ModelT], path_or_str: Union[str, Path]) -> ModelT:
        """
        Create a model from a YAML file or a YAML string.

        Args:
            path_or_str: Path to YAML file or YAML string.

        Returns:
            Validated model instance.

        Raises:
            FileNotFoundError: If a Path is given that doesn't exist.
            ConfigError: If YAML parsing or validation fails.
        """
        if isinstance(path_or_str, Path):
            if not path_or_str.exists():
                raise FileNotFoundError(f"YAML file not found: {path_or_str}")
            text = path_or_str.read_text(encoding="utf-8")
        else:
            text = path_or_str
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML: {e}") from e
        return cls.from_dict(data if data is not None else {})

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)

    def to_yaml(self, path: Optional[Union[str, Path]] = None) -> Optional[str]:
        """
        Convert the configuration to YAML.

        Args:
            path: Optional path to write the YAML to.

        Returns:
            YAML string if path is None, None otherwise.
        """
        yaml_str = yaml.safe_dump(self.to_dict(), default_flow_style=False, sort_keys=False)
        if path:
            Path(path).write_text(yaml_str, encoding="utf-8")
            return None
        return yaml_str


class GraphMeta(ConfigModel):
    """
    Random HHC construction settings.

    Attributes:
        max_leader_children: Child cap of the leader.
        max_follower_children: Child cap of every follower.
        comm_range: Range within which a new robot must see both parents (m).
        min_separation: Minimum distance between placed robots (m).
        max_attempts: Rejection-sampling attempts per robot.
    """

    max_leader_children: int = Field(4, ge=2)
    max_follower_children: int = Field(3, ge=2)
    comm_range: float = Field(2.0, gt=0)
    min_separation: float = Field(0.5, ge=0)
    max_attempts: int = Field(2000, ge=1)


class AbmcParams(ConfigModel):
    """
    Backup-path consensus parameters.

    Attributes:
        eta: Convergence rate factor.
        rho: Weight of the hierarchy difference in the bias.
        psi: Congestion weight.
        kappa_d: Outdegree above which congestion is penalized.
        gamma: Bias floor.
        r: Communication range for candidate parents (m).
        K: Maximum consensus iterations per pass.
        zeta: Convergence tolerance.
        tau: Cost slack for alternative paths.
        dt: Consensus sampling interval; dt/eta must lie in (0, 1].
        hysteresis: Consecutive improving iterations before a backup parent switch.
        congestion_passes: Consensus passes used to refresh congestion outdegrees.
        leader_state: Fixed consensus state of the leader.
        first_follower_state: Fixed consensus state of the first follower.
    """

    eta: float = Field(0.1, gt=0)
    rho: float = Field(0.9, gt=0)
    psi: float = Field(0.5, ge=0)
    kappa_d: int = Field(6, ge=0)
    gamma: float = Field(0.1, gt=0)
    r: float = Field(2.0, gt=0)
    K: int = Field(2000, ge=0)
    zeta: float = Field(1e-10, gt=0)
    tau: float = Field(0.15, ge=0)
    dt: float = Field(0.05, gt=0)
    hysteresis: int = Field(3, ge=0)
    congestion_passes: int = Field(3, ge=1)
    leader_state: float = Field(0.0, ge=0)
    first_follower_state: float = Field(1.0, ge=0)

    @model_validator(mode="after")
    def _check_step(self) -> "AbmcParams":
        step = self.dt / self.eta
        if not 0 < step <= 1:
            raise ValueError(f"dt/eta must lie in (0, 1], got {step}")
        return self

    @property
    def step(self) -> float:
        return self.dt / self.eta


class FaultMeta(ConfigModel):
    """
    Intermittent offset fault settings.

    Attributes:
        p_f: Activation probability per tick.
        offset: Offset (o_x, o_y) added while active (m).
        duration_model: "geometric" or "fixed" active-interval law.
        mean_duration_ticks: Mean (geometric) or exact (fixed) active length in ticks.
        faulty_parents: How many parent links of each targeted robot are faulty (0-2).
        robots: Targeted robots; None targets the followers the backup layer covers.
        robot_offsets: Per-robot offset overrides.
    """

    p_f: float = Field(0.0, ge=0, le=1)
    offset: Tuple[float, float] = (0.5, 0.5)
    duration_model: Literal["geometric", "fixed"] = "geometric"
    mean_duration_ticks: float = Field(3.0, ge=1)
    faulty_parents: int = Field(2, ge=0, le=2)
    robots: Optional[List[int]] = None
    robot_offsets: Dict[int, Tuple[float, float]] = Field(default_factory=dict)

    @field_validator("offset")
    @classmethod
    def _finite_offset(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("offset components must be finite")
        return v

    def offset_for(self, robot: int) -> Tuple[float, float]:
        return self.robot_offsets.get(robot, self.offset)


class ChannelMeta(ConfigModel):
    """
    Per-hop channel noise settings.

    Attributes:
        p_e: Bit-error probability per hop.
        noise_coefficient: c in sigma_e^2 = c * p_e (m^2).
    """

    p_e: float = Field(0.02, ge=0, le=1)
    noise_coefficient: float = Field(0.04, ge=0)


class DetectorParams(ConfigModel):
    """
    LLR detector and routing state machine settings.

    Attributes:
        window: Samples per sliding window (N).
        theta: Recovery factor.
        gamma_majority: Votes needed to declare a fault; None means ceil(|B|/2).
        lock_duration: Lock-in time in seconds; None means 10 * dt.
        dt: Sampling interval (s).
        eps_cov: Diagonal covariance regularization (m^2).
        history: Unflagged ticks whose LLRs form the baseline; None means window.
        det_floor: Lower clamp for covariance determinants.
    """

    window: int = Field(20, ge=2)
    theta: float = Field(0.3, gt=0, lt=1)
    gamma_majority: Optional[int] = Field(None, ge=1)
    lock_duration: Optional[float] = Field(None, ge=0)
    dt: float = Field(0.1, gt=0)
    eps_cov: float = Field(1e-4, gt=0)
    history: Optional[int] = Field(None, ge=1)
    det_floor: float = Field(1e-12, gt=0)

    @property
    def t_dur(self) -> float:
        return self.lock_duration if self.lock_duration is not None else 10 * self.dt

    @property
    def history_length(self) -> int:
        return self.history if self.history is not None else self.window

    @property
    def warmup_ticks(self) -> int:
        """Ticks before faults start: one window to fill, then a full baseline."""
        return self.window + self.history_length

    def majority(self, n_paths: int) -> int:
        if self.gamma_majority is not None:
            return self.gamma_majority
        return max(1, math.ceil(n_paths / 2))


class BurstMeta(ConfigModel):
    """Raised fault probability over [t_start, t_end) seconds."""

    p_f: float = Field(..., ge=0, le=1)
    t_start: float = Field(..., ge=0)
    t_end: float = Field(..., gt=0)

    @model_validator(mode="after")
    def _check_interval(self) -> "BurstMeta":
        if self.t_end <= self.t_start:
            raise ValueError(f"burst end {self.t_end} must come after start {self.t_start}")
        return self


class ScenarioConfig(ConfigModel):
    """
    Single-trial configuration.

    Attributes:
        n: Robot count.
        d: Spatial dimension (2 or 3).
        seed: Trial seed.
        duration: Simulated time (s).
        dt: Control interval (s).
        leader_speed: Leader speed (m/s).
        leader_axis: Axis of leader motion. None means the vertical z axis in
            3D; a planar swarm has no z, so its leader moves along y instead.
        control_gain: Proportional formation gain.
        breakdown_threshold: Cumulative error above which a robot is irrecoverable.
        error_deadband: Instantaneous error not accumulated towards breakdown (m).
        mitigation_enabled: Whether detected faults reroute to backup paths.
        failed_robots: Robots removed (with role reassignment) before the run.
    """

    schema_version: Literal[1] = SCHEMA_VERSION
    name: Optional[str] = None
    n: int = Field(20, ge=2)
    d: Literal[2, 3] = 2
    seed: int = Field(0, ge=0)
    duration: float = Field(60.0, gt=0)
    dt: float = Field(0.1, gt=0)
    leader_speed: float = Field(0.1, ge=0)
    leader_axis: Optional[Literal["x", "y", "z"]] = None
    control_gain: float = Field(0.8, gt=0)
    breakdown_threshold: float = Field(1.0, gt=0)
    error_deadband: float = Field(0.1, ge=0)
    mitigation_enabled: bool = True
    failed_robots: List[int] = Field(default_factory=list)
    graph: GraphMeta = Field(default_factory=GraphMeta)
    abmc: AbmcParams = Field(default_factory=AbmcParams)
    fault: FaultMeta = Field(default_factory=FaultMeta)
    channel: ChannelMeta = Field(default_factory=ChannelMeta)
    detector: DetectorParams = Field(default_factory=DetectorParams)
    burst: Optional[BurstMeta] = None

    @model_validator(mode="after")
    def _check_scenario(self) -> "ScenarioConfig":
        if self.control_gain * self.dt >= 1:
            raise ValueError(
                f"control_gain * dt must stay below 1, got {self.control_gain * self.dt}"
            )
        if self.leader_axis == "z" and self.d == 2:
            raise ValueError("leader_axis 'z' requires d = 3")
        if self.burst is not None and self.burst.t_end > self.duration:
            raise ValueError(
                f"burst interval [{self.burst.t_start}, {self.burst.t_end}] exceeds duration {self.duration}"
            )
        failed = set(self.failed_robots)
        if 1 in failed:
            raise ValueError("the leader (robot 1) cannot be listed in failed_robots")
        unknown = sorted(i for i in failed if not 1 <= i <= self.n)
        if unknown:
            raise ValueError(f"failed_robots contains unknown ids {unknown}")
        if self.n - len(failed) < 2:
            raise ValueError("fewer than two robots would survive failed_robots")
        return self

    @property
    def ticks(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def axis(self) -> str:
        """Axis the leader moves along, with the planar y stand-in for z."""
        if self.leader_axis is not None:
            return self.leader_axis
        return "z" if self.d == 3 else "y"

    def leader_velocity(self) -> np.ndarray:
        velocity = np.zeros(self.d)
        velocity[AXIS_NAMES.index(self.axis)] = self.leader_speed
        return velocity

    def p_f_at(self, t: float) -> float:
        """Fault probability in effect at time t."""
        if self.burst is not None and self.burst.t_start <= t < self.burst.t_end:
            return self.burst.p_f
        return self.fault.p_f

    def detector_params(self) -> DetectorParams:
        """Detector settings sampled at the control interval."""
        return self.detector.model_copy(update={"dt": self.dt})


class SweepAxis(ConfigModel):
    """
    One swept parameter.

    Attributes:
        path: Dotted parameter path into ScenarioConfig (e.g. "fault.p_f").
        values: Values taken along the axis.
    """

    path: str = Field(..., min_length=1)
    values: List[Any] = Field(..., min_length=1)


class SweepSpec(ConfigModel):
    """
    Monte Carlo sweep over a parameter grid.

    Attributes:
        base: Scenario every cell starts from.
        axes: Swept parameters; the grid is their Cartesian product.
        trials: Trials per cell.
        seed_base: Root of the per-trial seed derivation.
        centralized: Also run the centralized likelihood-ratio benchmark per cell.
        centralized_ticks: Labeled samples per centralized benchmark trial.
    """

    schema_version: Literal[1] = SCHEMA_VERSION
    name: Optional[str] = None
    base: ScenarioConfig = Field(default_factory=ScenarioConfig)
    axes: List[SweepAxis] = Field(..., min_length=1)
    trials: int = Field(20, ge=1)
    seed_base: int = Field(0, ge=0)
    centralized: bool = False
    centralized_ticks: int = Field(2000, ge=10)

    @field_validator("axes")
    @classmethod
    def _unique_paths(cls, v: List[SweepAxis]) -> List[SweepAxis]:
        paths = [axis.path for axis in v]
        if len(paths) != len(set(paths)):
            raise ValueError(f"duplicate sweep axes: {paths}")
        return v

    @property
    def cell_count(self) -> int:
        return int(np.prod([len(axis.values) for axis in self.axes]))
