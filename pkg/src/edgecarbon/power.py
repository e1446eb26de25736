"""Device power models, PUE scaling and energy integration.

A :class:`PowerModel` maps utilization in ``[0, 1]`` to total wall power using
measured points, interpolated piecewise-linearly. Measured load curves are
rarely smooth enough for a parametric fit, so none is attempted.
"""

from __future__ import annotations

import bisect
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, ModelError, ValidationError
from .units import Energy, Power, TimeInterval


def _finite(value: float, name: str) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be a number, got {value!r}")
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a number, got {value!r}") from exc
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PowerModel:
    """Utilization-to-watts curve for one device.

    ``points`` holds ``(utilization, watts)`` pairs sorted by utilization.
    Below the first point the curve runs linearly from ``(0, idle_watts)``;
    above the last point it is clamped. ``facility_housed`` marks devices
    whose energy is scaled by the facility PUE.
    """

    device_name: str
    idle_watts: float
    points: tuple[tuple[float, float], ...]
    max_watts: float
    facility_housed: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.device_name, str) or not self.device_name:
            raise ValidationError("device_name must be a non-empty string")
        idle = _finite(self.idle_watts, "idle_watts")
        peak = _finite(self.max_watts, "max_watts")
        if idle < 0 or peak < 0:
            raise ValidationError("idle_watts and max_watts must be non-negative")
        if idle > peak:
            raise ValidationError(f"{self.device_name}: idle_watts {idle} exceeds max_watts {peak}")
        pts = []
        for pair in self.points:
            try:
                u, w = pair
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{self.device_name}: point {pair!r} is not a (utilization, watts) pair") from exc
            u = _finite(u, "utilization")
            w = _finite(w, "watts")
            if not 0.0 <= u <= 1.0:
                raise ValidationError(f"{self.device_name}: utilization {u} outside [0, 1]")
            if w < 0:
                raise ValidationError(f"{self.device_name}: negative watts {w} at utilization {u}")
            if w > peak:
                raise ValidationError(f"{self.device_name}: {w} W at utilization {u} exceeds max_watts {peak}")
            pts.append((u, w))
        for (u0, _), (u1, _) in zip(pts, pts[1:]):
            if u1 <= u0:
                raise ValidationError(
                    f"{self.device_name}: utilization points must be strictly ascending ({u0} then {u1})"
                )
        object.__setattr__(self, "idle_watts", idle)
        object.__setattr__(self, "max_watts", peak)
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "facility_housed", bool(self.facility_housed))

    @classmethod
    def constant(cls, device_name: str, watts: float, facility_housed: bool = False) -> PowerModel:
        """A device drawing ``watts`` regardless of load."""
        return cls(device_name, watts, ((1.0, watts),), watts, facility_housed)

    def _knots(self) -> tuple[list[float], list[float]]:
        if not self.points:
            raise ModelError(f"{self.device_name}: power model has no measured points")
        us = [u for u, _ in self.points]
        ws = [w for _, w in self.points]
        if us[0] > 0.0:
            us.insert(0, 0.0)
            ws.insert(0, self.idle_watts)
        return us, ws


@dataclass(frozen=True)
class FacilityProfile:
    name: str
    pue: float = 1.0

    def __post_init__(self) -> None:
        pue = _finite(self.pue, "pue")
        if pue < 1.0:
            raise ValidationError(f"PUE must be >= 1.0, got {pue}")
        object.__setattr__(self, "pue", pue)


@dataclass(frozen=True)
class PowerTrace:
    """Power samples ``(t, watts)``; the signal is linear between samples."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        samples = tuple((_finite(t, "timestamp"), _finite(w, "watts")) for t, w in self.samples)
        if not samples:
            raise ValidationError("power trace needs at least one sample")
        for t0, t1 in zip(samples, samples[1:]):
            if t1[0] <= t0[0]:
                raise ValidationError(f"trace timestamps must be strictly increasing ({t0[0]} then {t1[0]})")
        if any(w < 0 for _, w in samples):
            raise ValidationError("trace contains negative power")
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def watts(self) -> np.ndarray:
        return np.array([w for _, w in self.samples])

    @property
    def span(self) -> TimeInterval:
        if len(self.samples) < 2:
            raise CoverageError("a power trace needs at least two samples to span an interval")
        return TimeInterval(self.samples[0][0], self.samples[-1][0])

    def __add__(self, other: PowerTrace) -> PowerTrace:
        """Sum two traces on the union of their sample times (overlap only)."""
        if not isinstance(other, PowerTrace):
            return NotImplemented
        a, b = self.span, other.span
        lo, hi = max(a.start, b.start), min(a.end, b.end)
        if hi <= lo:
            raise CoverageError("traces do not overlap")
        ts = np.union1d(self.times, other.times)
        ts = ts[(ts >= lo) & (ts <= hi)]
        ws = np.interp(ts, self.times, self.watts) + np.interp(ts, other.times, other.watts)
        return PowerTrace(tuple(zip(ts.tolist(), ws.tolist())))


def power_at(model: PowerModel, utilization: float) -> Power:
    """Wall power of ``model`` at ``utilization``.

    Exact at measured utilizations, linear in between, clamped above the last
    measured point.
    """
    u = _finite(utilization, "utilization")
    if not 0.0 <= u <= 1.0:
        raise ValidationError(f"utilization {u} outside [0, 1]")
    us, ws = model._knots()
    i = bisect.bisect_left(us, u)
    if i == len(us):
        return Power(ws[-1])
    if us[i] == u:
        return Power(ws[i])
    # fraction first, then blend: stays bounded even for nearly coincident knots
    f = (u - us[i - 1]) / (us[i] - us[i - 1])
    return Power((1.0 - f) * ws[i - 1] + f * ws[i])


def integrate_energy(trace: PowerTrace, interval: TimeInterval) -> Energy:
    """Trapezoidal integral of ``trace`` over ``interval`` (no PUE)."""
    span = trace.span
    if interval.start < span.start or interval.end > span.end:
        raise CoverageError(
            f"interval [{interval.start}, {interval.end}) outside trace span [{span.start}, {span.end}]"
        )
    ts, ws = trace.times, trace.watts
    inner = (ts > interval.start) & (ts < interval.end)
    grid = np.concatenate(([interval.start], ts[inner], [interval.end]))
    values = np.interp(grid, ts, ws)
    return Energy(max(float(np.trapezoid(values, grid)), 0.0))


def apply_pue(compute_energy: Energy, facility: FacilityProfile) -> Energy:
    return Energy(compute_energy.joules * facility.pue)


def task_power_trace(model: PowerModel, utilization_profile: Iterable[tuple[float, float]]) -> PowerTrace:
    """Map a ``(t, utilization)`` profile sample-wise through :func:`power_at`."""
    profile: Sequence[tuple[float, float]] = list(utilization_profile)
    for (t0, _), (t1, _) in zip(profile, profile[1:]):
        if t1 <= t0:
            raise ValidationError(f"utilization profile timestamps must be strictly increasing ({t0} then {t1})")
    return PowerTrace(tuple((t, power_at(model, u).watts) for t, u in profile))


def sum_traces(traces: Iterable[PowerTrace]) -> PowerTrace:
    """Sum component traces (e.g. CPU host plus accelerator); no interaction term."""
    traces = list(traces)
    if not traces:
        raise ValidationError("no traces to sum")
    total = traces[0]
    for trace in traces[1:]:
        total = total + trace
    return total
