"""Carbon intensity series, energy-mix aggregation and emissions accounting.

Emissions use the average (grid-mix) carbon intensity. Marginal emissions of
additional load are not modelled, so shifting results should be read as
indicative.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, CoverageError, ValidationError
from .units import JOULES_PER_KWH, CarbonIntensity, CarbonMass, Energy, TimeInterval

SHARE_TOLERANCE = 1e-6

AVERAGE_CI_DISCLAIMER = (
    "Emissions use average grid carbon intensity (grid-mix CI), not marginal emissions; "
    "load shifted to a cleaner time or place may in reality be served by different generation. "
    "Embodied emissions of hardware are not included."
)


def _number(value: float, name: str) -> float:
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
class SourceCoefficients:
    """Lifecycle carbon intensity (gCO2eq/kWh) per generating source."""

    values: Mapping[str, float]

    def __post_init__(self) -> None:
        clean = {}
        for name, ci in dict(self.values).items():
            if not isinstance(name, str) or not name:
                raise ValidationError(f"source name must be a non-empty string, got {name!r}")
            ci = _number(ci, f"coefficient for {name}")
            if ci < 0:
                raise ValidationError(f"coefficient for {name} must be non-negative, got {ci}")
            clean[name] = ci
        object.__setattr__(self, "values", clean)

    def __getitem__(self, source: str) -> float:
        return self.values[source]

    def __contains__(self, source: object) -> bool:
        return source in self.values


@dataclass(frozen=True)
class EnergyMixSnapshot:
    timestamp: float
    shares: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamp", _number(self.timestamp, "timestamp"))
        clean = {}
        for name, share in dict(self.shares).items():
            if not isinstance(name, str) or not name:
                raise ValidationError(f"source name must be a non-empty string, got {name!r}")
            share = _number(share, f"share of {name}")
            if not 0.0 <= share <= 1.0:
                raise ValidationError(f"share of {name} is {share}, outside [0, 1]")
            clean[name] = share
        if not clean:
            raise ValidationError("energy mix has no sources")
        total = math.fsum(clean.values())
        if abs(total - 1.0) > SHARE_TOLERANCE:
            raise ValidationError(f"shares sum to {total:.9g}, expected 1")
        object.__setattr__(self, "shares", clean)


@dataclass(frozen=True)
class CarbonIntensitySeries:
    """Step-function CI series: each value holds until the next timestamp.

    The last value holds for ``hold_s`` seconds. When omitted it defaults to
    the spacing of the last two points, or forever for a single point.
    """

    region: str
    points: tuple[tuple[float, float], ...]
    hold_s: Optional[float] = None

    def __post_init__(self) -> None:
        pts = []
        for pair in self.points:
            try:
                t, ci = pair
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"series point {pair!r} is not a (timestamp, ci) pair") from exc
            t = _number(t, "timestamp")
            ci = CarbonIntensity(_number(ci, "carbon intensity")).g_per_kwh
            pts.append((t, ci))
        if not pts:
            raise ValidationError(f"carbon intensity series for {self.region!r} is empty")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if t1 <= t0:
                raise ValidationError(f"series timestamps must be strictly increasing ({t0} then {t1})")
        hold = self.hold_s
        if hold is None:
            hold = pts[-1][0] - pts[-2][0] if len(pts) > 1 else math.inf
        elif isinstance(hold, bool) or not isinstance(hold, (int, float)) or math.isnan(hold) or hold <= 0:
            raise ValidationError(f"hold_s must be positive, got {hold!r}")
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "hold_s", float(hold))

    @classmethod
    def constant(cls, region: str, ci: float, start: float = 0.0) -> CarbonIntensitySeries:
        return cls(region, ((start, ci),), math.inf)

    @property
    def start(self) -> float:
        return self.points[0][0]

    @property
    def end(self) -> float:
        return self.points[-1][0] + self.hold_s

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points])

    def covers(self, interval: TimeInterval) -> bool:
        return self.start <= interval.start and interval.end <= self.end

    def breakpoints(self, interval: TimeInterval) -> list[float]:
        """Series timestamps strictly inside ``interval``."""
        ts = self.times
        return ts[(ts > interval.start) & (ts < interval.end)].tolist()

    def scaled(self, k: float) -> CarbonIntensitySeries:
        return CarbonIntensitySeries(self.region, tuple((t, v * k) for t, v in self.points), self.hold_s)


@dataclass(frozen=True)
class GridProfile:
    """Where CI comes from for a region: a series, or a mix series plus coefficients."""

    region: str
    ci_series: Optional[CarbonIntensitySeries] = None
    mix: Optional[tuple[EnergyMixSnapshot, ...]] = None
    coefficients: Optional[SourceCoefficients] = None
    _built: Optional[CarbonIntensitySeries] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        has_series = self.ci_series is not None
        has_mix = self.mix is not None or self.coefficients is not None
        if has_series == has_mix:
            raise ConfigurationError(
                f"grid {self.region!r}: give either a CI series or a mix series with coefficients, not both or neither"
            )
        if has_mix:
            if self.mix is None or self.coefficients is None:
                raise ConfigurationError(f"grid {self.region!r}: a mix series needs source coefficients")
            object.__setattr__(self, "mix", tuple(self.mix))
            built = build_ci_series(self.mix, self.coefficients, region=self.region)
            object.__setattr__(self, "_built", built)

    @classmethod
    def constant(cls, region: str, ci: float, start: float = 0.0) -> GridProfile:
        return cls(region, ci_series=CarbonIntensitySeries.constant(region, ci, start))

    @property
    def series(self) -> CarbonIntensitySeries:
        return self.ci_series if self.ci_series is not None else self._built

    def scaled(self, k: float) -> GridProfile:
        return GridProfile(self.region, ci_series=self.series.scaled(k))


@dataclass(frozen=True)
class SegmentEmission:
    interval: TimeInterval
    energy: Energy
    intensity: CarbonIntensity
    emissions: CarbonMass


def mix_to_ci(snapshot: EnergyMixSnapshot, coeffs: SourceCoefficients) -> CarbonIntensity:
    """Share-weighted sum of source coefficients."""
    missing = sorted(s for s in snapshot.shares if s not in coeffs)
    if missing:
        raise ConfigurationError(f"no carbon coefficient for source(s): {', '.join(missing)}")
    total = math.fsum(snapshot.shares.values())
    if abs(total - 1.0) > SHARE_TOLERANCE:
        raise ValidationError(f"shares sum to {total:.9g}, expected 1")
    return CarbonIntensity(math.fsum(share * coeffs[s] for s, share in snapshot.shares.items()))


def build_ci_series(
    mix_series: Sequence[EnergyMixSnapshot],
    coeffs: SourceCoefficients,
    region: str = "",
    hold_s: Optional[float] = None,
) -> CarbonIntensitySeries:
    mix_series = list(mix_series)
    if not mix_series:
        raise ValidationError("cannot build a CI series from an empty mix series")
    points = tuple((snap.timestamp, mix_to_ci(snap, coeffs).g_per_kwh) for snap in mix_series)
    return CarbonIntensitySeries(region, points, hold_s)


def ci_at(series: CarbonIntensitySeries, t: float) -> CarbonIntensity:
    """Value of the latest point at or before ``t``."""
    t = _number(t, "timestamp")
    if t < series.start:
        raise CoverageError(f"{series.region or 'series'}: t={t} precedes first point at {series.start}")
    if t >= series.end:
        raise CoverageError(f"{series.region or 'series'}: t={t} is past the series end at {series.end}")
    i = int(np.searchsorted(series.times, t, side="right")) - 1
    return CarbonIntensity(series.points[i][1])


def split_segment(interval: TimeInterval, energy: Energy, cuts: Iterable[float]) -> list[tuple[TimeInterval, Energy]]:
    """Split a segment at ``cuts``, sharing energy in proportion to duration."""
    edges = [interval.start, *sorted(c for c in cuts if interval.start < c < interval.end), interval.end]
    if len(edges) == 2:
        return [(interval, energy)]
    out = []
    for a, b in zip(edges, edges[1:]):
        out.append((TimeInterval(a, b), Energy(energy.joules * (b - a) / interval.duration)))
    return out


def itemize_emissions(
    energy_segments: Iterable[tuple[TimeInterval, Energy]], grid: GridProfile | CarbonIntensitySeries
) -> list[SegmentEmission]:
    """Per-segment emissions after aligning segments to CI breakpoints."""
    series = grid.series if isinstance(grid, GridProfile) else grid
    items: list[SegmentEmission] = []
    last_end = -math.inf
    for interval, energy in energy_segments:
        if interval.start < last_end:
            raise ValidationError("energy segments must be ordered and non-overlapping")
        last_end = interval.end
        if not series.covers(interval):
            raise CoverageError(
                f"grid {series.region or '?'} spans [{series.start}, {series.end}) "
                f"but a segment needs [{interval.start}, {interval.end})"
            )
        for piece, piece_energy in split_segment(interval, energy, series.breakpoints(interval)):
            ci = ci_at(series, piece.midpoint)
            grams = piece_energy.joules / JOULES_PER_KWH * ci.g_per_kwh
            items.append(SegmentEmission(piece, piece_energy, ci, CarbonMass(grams)))
    return items


def emissions(
    energy_segments: Iterable[tuple[TimeInterval, Energy]], grid: GridProfile | CarbonIntensitySeries
) -> CarbonMass:
    """Total emissions of time-stamped energy against a (possibly varying) grid."""
    items = itemize_emissions(energy_segments, grid)
    return CarbonMass(math.fsum(item.emissions.grams for item in items))


def tile_daily(series: CarbonIntensitySeries, days: int, period_s: float = 86400.0) -> CarbonIntensitySeries:
    """Repeat a one-period series ``days`` times, e.g. to sweep a typical day past midnight."""
    if days < 1:
        raise ValidationError("days must be >= 1")
    if series.end - series.start > period_s:
        raise ValidationError("series is longer than one period")
    pts = [(t + k * period_s, v) for k in range(days) for t, v in series.points]
    return CarbonIntensitySeries(series.region, tuple(pts), series.hold_s)
