"""Work items: training runs, inference batches and data transfers."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import ValidationError
from .units import JOULES_PER_WH, Energy, Power

ITEMS_PER_PROFILE_BATCH = 5000
# Protocol/framing overhead on a raw link. Makes 144 GB over 100 Mbps take ~3.5 h.
DEFAULT_TRANSFER_EFFICIENCY = 0.915


def _positive(value: float, name: str, allow_zero: bool = False) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be a number, got {value!r}")
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a number, got {value!r}") from exc
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValidationError(f"{name} must be finite and {bound}, got {value!r}")
    return value


def _count(value: int, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValidationError(f"{name} must be a non-negative integer, got {value!r}")
    return value


@dataclass(frozen=True)
class ModelProfile:
    """Measured inference characteristics of one model architecture.

    ``energy_wh_per_5k`` is the energy to classify 5000 items.
    """

    name: str
    params_millions: float
    size_mb: float
    accuracy_pct: float
    mean_inference_ms: float
    energy_wh_per_5k: float

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise ValidationError("model name must be a non-empty string")
        object.__setattr__(self, "params_millions", _positive(self.params_millions, "params_millions"))
        object.__setattr__(self, "size_mb", _positive(self.size_mb, "size_mb"))
        acc = _positive(self.accuracy_pct, "accuracy_pct", allow_zero=True)
        if acc > 100:
            raise ValidationError(f"accuracy_pct must be <= 100, got {acc}")
        object.__setattr__(self, "accuracy_pct", acc)
        object.__setattr__(self, "mean_inference_ms", _positive(self.mean_inference_ms, "mean_inference_ms"))
        object.__setattr__(
            self, "energy_wh_per_5k", _positive(self.energy_wh_per_5k, "energy_wh_per_5k", allow_zero=True)
        )


def inference_energy(profile: ModelProfile, item_count: int) -> Energy:
    item_count = _count(item_count, "item_count")
    return Energy(profile.energy_wh_per_5k * JOULES_PER_WH * item_count / ITEMS_PER_PROFILE_BATCH)


def inference_duration(profile: ModelProfile, item_count: int) -> float:
    """Seconds to run ``item_count`` inferences back to back."""
    item_count = _count(item_count, "item_count")
    return profile.mean_inference_ms * item_count / 1000.0


def implied_mean_power(profile: ModelProfile) -> Power:
    """Average draw implied by the profile's energy and latency columns."""
    seconds = profile.mean_inference_ms / 1000.0
    if seconds <= 0:
        raise ValidationError(f"{profile.name}: zero inference time")
    return Power(inference_energy(profile, 1).joules / seconds)


def transfer_duration(
    n_bytes: int, bandwidth_bps: float, efficiency: float = DEFAULT_TRANSFER_EFFICIENCY
) -> float:
    """Seconds to move ``n_bytes`` over a link at ``efficiency`` of its nominal rate."""
    n_bytes = _count(n_bytes, "bytes")
    bandwidth_bps = _positive(bandwidth_bps, "bandwidth_bps")
    efficiency = _positive(efficiency, "efficiency")
    if efficiency > 1:
        raise ValidationError(f"efficiency must be in (0, 1], got {efficiency}")
    return n_bytes * 8 / (bandwidth_bps * efficiency)


def transfer_energy(n_bytes: int, joules_per_bit: float = 0.0) -> Energy:
    n_bytes = _count(n_bytes, "bytes")
    joules_per_bit = _positive(joules_per_bit, "joules_per_bit", allow_zero=True)
    return Energy(n_bytes * 8 * joules_per_bit)


class TaskKind(str, Enum):
    TRAINING = "training"
    INFERENCE = "inference"
    TRANSFER = "transfer"


@dataclass(frozen=True)
class Task:
    """One unit of work, placed ``start_offset_s`` after the scenario anchor.

    Training tasks carry ``duration_s`` and a utilization profile per device,
    given as ``(seconds since task start, utilization)`` pairs. Inference tasks
    derive duration and energy from ``model`` and ``item_count``; transfer
    tasks from ``n_bytes`` and the link parameters. ``device`` binds
    inference and transfer tasks to a device for PUE purposes.
    """

    id: str
    kind: TaskKind
    start_offset_s: float = 0.0
    duration_s: Optional[float] = None
    utilization: Mapping[str, tuple[tuple[float, float], ...]] = field(default_factory=dict)
    device: Optional[str] = None
    model: Optional[ModelProfile] = None
    item_count: int = 0
    n_bytes: int = 0
    bandwidth_bps: Optional[float] = None
    efficiency: float = DEFAULT_TRANSFER_EFFICIENCY
    joules_per_bit: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("task id must be a non-empty string")
        try:
            kind = TaskKind(self.kind)
        except ValueError as exc:
            raise ValidationError(f"task {self.id}: unknown kind {self.kind!r}") from exc
        object.__setattr__(self, "kind", kind)
        object.__setattr__(
            self, "start_offset_s", _positive(self.start_offset_s, f"task {self.id} start_offset_s", allow_zero=True)
        )
        if kind is TaskKind.TRAINING:
            if self.duration_s is None:
                raise ValidationError(f"task {self.id}: training tasks need duration_s")
            object.__setattr__(self, "duration_s", _positive(self.duration_s, f"task {self.id} duration_s"))
            if not self.utilization:
                raise ValidationError(f"task {self.id}: training tasks need a utilization profile per device")
            profiles = {}
            for device, profile in dict(self.utilization).items():
                pts = tuple((float(t), float(u)) for t, u in profile)
                if not pts:
                    raise ValidationError(f"task {self.id}: empty utilization profile for {device}")
                for t, _ in pts:
                    if not 0 <= t <= self.duration_s:
                        raise ValidationError(f"task {self.id}: profile offset {t} outside [0, duration]")
                profiles[device] = pts
            object.__setattr__(self, "utilization", profiles)
        elif kind is TaskKind.INFERENCE:
            if self.model is None:
                raise ValidationError(f"task {self.id}: inference tasks need a model profile")
            if _count(self.item_count, "item_count") < 1:
                raise ValidationError(f"task {self.id}: inference item_count must be >= 1")
            object.__setattr__(self, "duration_s", inference_duration(self.model, self.item_count))
        else:
            if self.bandwidth_bps is None:
                raise ValidationError(f"task {self.id}: transfer tasks need bandwidth_bps")
            duration = transfer_duration(self.n_bytes, self.bandwidth_bps, self.efficiency)
            if duration <= 0:
                raise ValidationError(f"task {self.id}: transfer of {self.n_bytes} bytes has zero duration")
            object.__setattr__(self, "duration_s", duration)
            transfer_energy(self.n_bytes, self.joules_per_bit)

    @property
    def devices(self) -> tuple[str, ...]:
        if self.kind is TaskKind.TRAINING:
            return tuple(self.utilization)
        return (self.device,) if self.device else ()

    @property
    def end_offset_s(self) -> float:
        return self.start_offset_s + self.duration_s


@dataclass(frozen=True)
class WorkloadTrace:
    tasks: tuple[Task, ...] = ()

    def __post_init__(self) -> None:
        tasks = tuple(self.tasks)
        seen = set()
        for task in tasks:
            if task.id in seen:
                raise ValidationError(f"duplicate task id {task.id!r}")
            seen.add(task.id)
        object.__setattr__(self, "tasks", tasks)

    @classmethod
    def of(cls, tasks: Iterable[Task]) -> WorkloadTrace:
        return cls(tuple(tasks))

    @property
    def horizon_s(self) -> float:
        """Seconds from the anchor until the last task finishes."""
        return max((t.end_offset_s for t in self.tasks), default=0.0)

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)
