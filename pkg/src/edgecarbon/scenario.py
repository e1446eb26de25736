"""Scenario estimation and the what-if sweeps built on it.

:func:`estimate` turns a :class:`Scenario` into a :class:`ScenarioReport`.
The sweeps re-run the estimate while varying one thing: start time
(:func:`sweep_start_time`), grid (:func:`compare_locations`), model
architecture (:func:`compare_models`) or resource configuration
(:func:`sweep_resources`). :func:`pareto_front` filters any resulting table.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Optional, TypeVar

from .carbon import AVERAGE_CI_DISCLAIMER, GridProfile, SegmentEmission, emissions, itemize_emissions
from .errors import ConfigurationError, CoverageError, ValidationError
from .power import FacilityProfile, PowerModel, apply_pue, integrate_energy, power_at, task_power_trace
from .units import CarbonMass, Energy, Power, TimeInterval, format_timestamp
from .workload import (
    ModelProfile,
    Task,
    TaskKind,
    WorkloadTrace,
    inference_duration,
    inference_energy,
    transfer_energy,
)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Scenario:
    devices: Mapping[str, PowerModel]
    facility: FacilityProfile
    grid: GridProfile
    workload: WorkloadTrace
    anchor_time: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "devices", dict(self.devices))
        for name, model in self.devices.items():
            if model.device_name != name:
                raise ConfigurationError(f"device key {name!r} does not match model name {model.device_name!r}")
        for task in self.workload:
            for device in task.devices:
                if device not in self.devices:
                    raise ConfigurationError(f"task {task.id!r} is bound to unknown device {device!r}")
        if len(self.workload):
            horizon = TimeInterval(self.anchor_time, self.anchor_time + self.workload.horizon_s)
            series = self.grid.series
            if not series.covers(horizon):
                raise CoverageError(
                    f"grid {self.grid.region!r} spans [{format_timestamp(series.start)}, "
                    f"{_fmt_end(series.end)}) but the workload needs "
                    f"[{format_timestamp(horizon.start)}, {format_timestamp(horizon.end)})"
                )

    @property
    def horizon(self) -> Optional[TimeInterval]:
        if not len(self.workload):
            return None
        return TimeInterval(self.anchor_time, self.anchor_time + self.workload.horizon_s)


def _fmt_end(t: float) -> str:
    return format_timestamp(t) if math.isfinite(t) else "open end"


@dataclass(frozen=True)
class TaskResult:
    task_id: str
    kind: TaskKind
    interval: TimeInterval
    energy: Energy
    emissions: CarbonMass
    segments: tuple[SegmentEmission, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class ScenarioReport:
    total_energy: Energy
    total_emissions: CarbonMass
    tasks: tuple[TaskResult, ...]
    disclaimer: str = AVERAGE_CI_DISCLAIMER

    @classmethod
    def from_tasks(cls, tasks: Iterable[TaskResult]) -> ScenarioReport:
        tasks = tuple(tasks)
        return cls(
            Energy(math.fsum(t.energy.joules for t in tasks)),
            CarbonMass(math.fsum(t.emissions.grams for t in tasks)),
            tasks,
        )


@dataclass(frozen=True)
class Candidate:
    label: str
    report: ScenarioReport
    value: Any = None


@dataclass(frozen=True)
class SweepResult:
    """Candidates in enumeration order plus the index of the lowest-emission one."""

    candidates: tuple[Candidate, ...]
    best_index: int

    @classmethod
    def from_candidates(cls, candidates: Iterable[Candidate]) -> SweepResult:
        candidates = tuple(candidates)
        if not candidates:
            raise ValidationError("a sweep needs at least one candidate")
        best = 0
        for i, cand in enumerate(candidates):
            # strict comparison keeps the first candidate on ties
            if cand.report.total_emissions.grams < candidates[best].report.total_emissions.grams:
                best = i
        return cls(candidates, best)

    @property
    def best(self) -> Candidate:
        return self.candidates[self.best_index]

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)


def _pue_for(scenario: Scenario, device: Optional[str]) -> FacilityProfile | None:
    if device is None:
        return None
    return scenario.facility if scenario.devices[device].facility_housed else None


def _absolute_profile(task: Task, device: str, start: float) -> list[tuple[float, float]]:
    profile = list(task.utilization[device])
    if profile[0][0] > 0:
        profile.insert(0, (0.0, profile[0][1]))
    if profile[-1][0] < task.duration_s:
        profile.append((task.duration_s, profile[-1][1]))
    return [(start + t, u) for t, u in profile]


def _training_segments(s: Scenario, task: Task, interval: TimeInterval) -> list[tuple[TimeInterval, Energy]]:
    edges = [interval.start, *s.grid.series.breakpoints(interval), interval.end]
    pieces = [TimeInterval(a, b) for a, b in zip(edges, edges[1:])]
    totals = [0.0] * len(pieces)
    for device in task.devices:
        profile = _absolute_profile(task, device, interval.start)
        trace = task_power_trace(s.devices[device], profile)
        facility = _pue_for(s, device)
        for i, piece in enumerate(pieces):
            energy = integrate_energy(trace, piece)
            if facility is not None:
                energy = apply_pue(energy, facility)
            totals[i] += energy.joules
    return [(piece, Energy(j)) for piece, j in zip(pieces, totals)]


def _estimate_task(s: Scenario, task: Task) -> TaskResult:
    start = s.anchor_time + task.start_offset_s
    interval = TimeInterval(start, start + task.duration_s)
    if task.kind is TaskKind.TRAINING:
        segments = _training_segments(s, task, interval)
    else:
        if task.kind is TaskKind.INFERENCE:
            energy = inference_energy(task.model, task.item_count)
        else:
            energy = transfer_energy(task.n_bytes, task.joules_per_bit)
        facility = _pue_for(s, task.device)
        if facility is not None:
            energy = apply_pue(energy, facility)
        segments = [(interval, energy)]
    items = itemize_emissions(segments, s.grid)
    return TaskResult(
        task.id,
        task.kind,
        interval,
        Energy(math.fsum(it.energy.joules for it in items)),
        CarbonMass(math.fsum(it.emissions.grams for it in items)),
        tuple(items),
    )


def estimate(s: Scenario) -> ScenarioReport:
    """Energy (PUE-scaled where facility-housed) and emissions of every task."""
    return ScenarioReport.from_tasks(_estimate_task(s, task) for task in s.workload)


def _run(fn: Callable[[T], R], items: Sequence[T], max_workers: Optional[int]) -> list[R]:
    # executor.map yields in submission order, so results never depend on completion order
    if max_workers and max_workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def start_times(window: TimeInterval, step_s: float) -> list[float]:
    if isinstance(step_s, bool) or not step_s > 0 or not math.isfinite(step_s):
        raise ValidationError(f"step must be positive, got {step_s!r}")
    n = math.ceil((window.end - window.start) / step_s)
    return [window.start + k * step_s for k in range(n) if window.start + k * step_s < window.end]


def sweep_start_time(
    s: Scenario, window: TimeInterval, step_s: float, max_workers: Optional[int] = None
) -> SweepResult:
    """Re-anchor the workload at every ``step_s`` inside ``window``."""
    starts = start_times(window, step_s)
    # re-anchoring validates coverage for each candidate before anything runs
    shifted = [replace(s, anchor_time=t) for t in starts]
    reports = _run(estimate, shifted, max_workers)
    return SweepResult.from_candidates(
        Candidate(format_timestamp(t), r, t) for t, r in zip(starts, reports)
    )


def compare_locations(
    s: Scenario, grids: Sequence[GridProfile], max_workers: Optional[int] = None
) -> SweepResult:
    """Run the same scenario against each grid; energy is unchanged, emissions differ."""
    moved = [replace(s, grid=g) for g in grids]
    reports = _run(estimate, moved, max_workers)
    return SweepResult.from_candidates(Candidate(g.region, r, g) for g, r in zip(grids, reports))


def relative_reduction(a: CarbonMass | float, b: CarbonMass | float) -> float:
    """Percent by which ``b`` undercuts ``a``; negative when ``b`` is larger."""
    a = a.grams if isinstance(a, CarbonMass) else float(a)
    b = b.grams if isinstance(b, CarbonMass) else float(b)
    if not a > 0:
        raise ValidationError(f"relative reduction against a baseline of {a} is undefined")
    return (a - b) / a * 100.0


@dataclass(frozen=True)
class ModelComparison:
    name: str
    accuracy_pct: float
    duration_s: float
    energy: Energy
    emissions: CarbonMass

    def metrics(self) -> dict[str, float]:
        return {
            "accuracy_pct": self.accuracy_pct,
            "duration_s": self.duration_s,
            "energy_wh": self.energy.wh,
            "emissions_g": self.emissions.grams,
        }


def compare_models(
    profiles: Iterable[ModelProfile], item_count: int, grid: GridProfile, at: float
) -> list[ModelComparison]:
    """Charge ``item_count`` inferences per architecture against ``grid`` starting at ``at``."""
    if isinstance(item_count, bool) or not isinstance(item_count, int) or item_count < 1:
        raise ValidationError(f"item_count must be a positive integer, got {item_count!r}")
    rows = []
    for profile in profiles:
        duration = inference_duration(profile, item_count)
        energy = inference_energy(profile, item_count)
        co2 = emissions([(TimeInterval(at, at + duration), energy)], grid)
        rows.append(ModelComparison(profile.name, profile.accuracy_pct, duration, energy, co2))
    return rows


@dataclass(frozen=True)
class ResourceConfig:
    """A device capped to a share of its capacity.

    ``utilization`` is the device-level load when the capped configuration is
    saturated, e.g. 6 of 12 cores is 0.5.
    """

    label: str
    model: PowerModel
    inference_ms: float
    utilization: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.inference_ms, bool) or not self.inference_ms > 0 or not math.isfinite(self.inference_ms):
            raise ValidationError(f"{self.label}: inference_ms must be positive, got {self.inference_ms!r}")


@dataclass(frozen=True)
class ResourceRow:
    label: str
    duration_s: float
    energy: Energy
    mean_power: Power

    def metrics(self) -> dict[str, float]:
        return {
            "duration_s": self.duration_s,
            "energy_j": self.energy.joules,
            "mean_power_w": self.mean_power.watts,
        }


def sweep_resources(
    configs: Iterable[ResourceConfig | tuple], item_count: int
) -> list[ResourceRow]:
    """Duration, energy and power per configuration for a sequential inference batch."""
    if isinstance(item_count, bool) or not isinstance(item_count, int) or item_count < 0:
        raise ValidationError(f"item_count must be a non-negative integer, got {item_count!r}")
    rows = []
    for cfg in configs:
        if not isinstance(cfg, ResourceConfig):
            cfg = ResourceConfig(*cfg)
        power = power_at(cfg.model, cfg.utilization)
        duration = cfg.inference_ms * item_count / 1000.0
        rows.append(ResourceRow(cfg.label, duration, Energy(power.watts * duration), power))
    return rows


def _dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def pareto_front(
    rows: Sequence[Mapping[str, float]], objectives: Sequence[tuple[str, str]]
) -> list[Mapping[str, float]]:
    """Rows no other row strictly dominates, in input order.

    ``objectives`` pairs a metric name with ``"max"`` or ``"min"``.
    """
    signs = []
    for metric, direction in objectives:
        if direction not in ("max", "min"):
            raise ValidationError(f"objective direction must be 'max' or 'min', got {direction!r}")
        signs.append((metric, 1.0 if direction == "max" else -1.0))
    vectors = []
    for row in rows:
        missing = [m for m, _ in signs if m not in row]
        if missing:
            raise ValidationError(f"row lacks metric(s): {', '.join(missing)}")
        vectors.append([sign * float(row[m]) for m, sign in signs])
    return [
        row
        for i, row in enumerate(rows)
        if not any(_dominates(vectors[j], vectors[i]) for j in range(len(rows)) if j != i)
    ]
