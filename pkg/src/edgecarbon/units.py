"""Canonical quantities and time handling.

Everything inside the library is kept in joules, watts, seconds, grams and
gCO2eq/kWh. Watt-hours, kilowatt-hours and kilograms only appear in the
convenience properties and at I/O boundaries.

Timestamps are plain floats holding UTC seconds since the Unix epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import ValidationError

JOULES_PER_WH = 3600.0
JOULES_PER_KWH = 3.6e6


def _check(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if value < 0:
        raise ValidationError(f"{name} must be non-negative, got {value!r}")
    return value


@dataclass(frozen=True, order=True)
class Energy:
    joules: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "joules", _check(self.joules, "energy"))

    @classmethod
    def from_wh(cls, wh: float) -> Energy:
        return cls(_check(wh, "energy (Wh)") * JOULES_PER_WH)

    @classmethod
    def from_kwh(cls, kwh: float) -> Energy:
        return cls(_check(kwh, "energy (kWh)") * JOULES_PER_KWH)

    @property
    def wh(self) -> float:
        return self.joules / JOULES_PER_WH

    @property
    def kwh(self) -> float:
        return self.joules / JOULES_PER_KWH

    def __add__(self, other: Energy) -> Energy:
        if not isinstance(other, Energy):
            return NotImplemented
        return Energy(self.joules + other.joules)

    def __mul__(self, k: float) -> Energy:
        return Energy(self.joules * k)

    __rmul__ = __mul__


@dataclass(frozen=True, order=True)
class Power:
    watts: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "watts", _check(self.watts, "power"))


@dataclass(frozen=True, order=True)
class CarbonMass:
    """Mass of CO2-equivalent emissions in grams."""

    grams: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "grams", _check(self.grams, "carbon mass"))

    @property
    def kg(self) -> float:
        return self.grams / 1000.0

    def __add__(self, other: CarbonMass) -> CarbonMass:
        if not isinstance(other, CarbonMass):
            return NotImplemented
        return CarbonMass(self.grams + other.grams)

    def __mul__(self, k: float) -> CarbonMass:
        return CarbonMass(self.grams * k)

    __rmul__ = __mul__


@dataclass(frozen=True, order=True)
class CarbonIntensity:
    g_per_kwh: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "g_per_kwh", _check(self.g_per_kwh, "carbon intensity"))


@dataclass(frozen=True, order=True)
class TimeInterval:
    """Half-open interval ``[start, end)`` in UTC epoch seconds."""

    start: float
    end: float

    def __post_init__(self) -> None:
        for name in ("start", "end"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"interval {name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.end <= self.start:
            raise ValidationError(f"interval end {self.end} must be after start {self.start}")

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def midpoint(self) -> float:
        return self.start + 0.5 * (self.end - self.start)

    def contains(self, t: float) -> bool:
        return self.start <= t < self.end

    def shift(self, dt: float) -> TimeInterval:
        return TimeInterval(self.start + dt, self.end + dt)


def wh_to_joules(wh: float) -> Energy:
    return Energy.from_wh(wh)


def energy_from_power(power: Power, duration_s: float) -> Energy:
    """Energy drawn by a constant load, ``E = P * t``."""
    duration_s = _check(duration_s, "duration")
    return Energy(power.watts * duration_s)


def parse_timestamp(text: str) -> float:
    """Parse an ISO-8601 timestamp into UTC epoch seconds.

    Naive timestamps are rejected; a trailing ``Z`` is accepted as UTC.
    """
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValidationError(f"not an ISO-8601 timestamp: {text!r}") from exc
    if dt.tzinfo is None:
        raise ValidationError(f"timestamp {text!r} has no UTC offset")
    try:
        return dt.timestamp()
    except (OverflowError, ValueError) as exc:
        raise ValidationError(f"timestamp {text!r} is out of range") from exc


def format_timestamp(t: float) -> str:
    """Inverse of :func:`parse_timestamp`; always renders in UTC with a ``Z`` suffix."""
    dt = datetime.fromtimestamp(t, tz=timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
