"""Parsers and writers for every external file format, plus bundled fixtures.

Data files (CI and mix series) are parsed leniently: bad rows are skipped
and itemized in a :class:`ParseReport`. Configuration files (power models,
coefficients, model profiles, scenarios) fail hard on the first problem.
Every parser raises only :class:`~edgecarbon.errors.EdgeCarbonError`
subclasses, whatever bytes it is fed.

Formats
-------
CI series CSV       ``timestamp,ci_g_per_kwh``
Mix series CSV      ``timestamp,source,share`` (long format)
Coefficients CSV    ``source,ci_g_per_kwh``
Model profiles CSV  ``name,params_millions,size_mb,accuracy_pct,mean_inference_ms,energy_wh_per_5k``
Power model JSON    ``{"schema_version": 1, "device_name", "idle_watts", "max_watts",
                    "facility_housed", "points": [{"utilization", "watts"}, ...]}``
Scenario JSON       see :func:`parse_scenario` and ``docs/scenario-schema.md`` in the repository

Timestamps are ISO-8601 with an explicit offset, e.g. ``2022-06-01T12:00:00Z``.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, TypeVar

from .carbon import CarbonIntensitySeries, EnergyMixSnapshot, GridProfile, SourceCoefficients
from .errors import EdgeCarbonError, ValidationError
from .power import FacilityProfile, PowerModel
from .scenario import ResourceConfig, Scenario
from .units import format_timestamp, parse_timestamp
from .workload import DEFAULT_TRANSFER_EFFICIENCY, ModelProfile, Task, WorkloadTrace

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CI_HEADER = ("timestamp", "ci_g_per_kwh")
MIX_HEADER = ("timestamp", "source", "share")
COEFF_HEADER = ("source", "ci_g_per_kwh")
PROFILE_HEADER = ("name", "params_millions", "size_mb", "accuracy_pct", "mean_inference_ms", "energy_wh_per_5k")

F = TypeVar("F", bound=Callable[..., Any])


@dataclass
class ParseReport:
    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.accepted + len(self.rejected)

    def reject(self, line: int, reason: str) -> None:
        self.rejected.append((line, reason))


def _structured(fn: F) -> F:
    """Convert any stray exception from a parser into a ValidationError."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EdgeCarbonError:
            raise
        except (
            UnicodeError,
            csv.Error,
            json.JSONDecodeError,
            KeyError,
            IndexError,
            TypeError,
            ValueError,
            AttributeError,
            OverflowError,
            RecursionError,
        ) as exc:
            raise ValidationError(f"{fn.__name__}: {type(exc).__name__}: {exc}") from exc

    return wrapper  # type: ignore[return-value]


def _text(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"input is not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc


def _rows(text: str, header: Sequence[str]) -> Iterable[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for non-blank rows after checking the header."""
    if "\x00" in text:
        raise ValidationError("input contains NUL bytes")
    reader = csv.reader(io.StringIO(text, newline=""))
    first = None
    for row in reader:
        if any(cell.strip() for cell in row):
            first = [cell.strip() for cell in row]
            break
    if first is None:
        raise ValidationError(f"empty file; expected header {','.join(header)}")
    if tuple(first) != tuple(header):
        raise ValidationError(f"line {reader.line_num}: expected header {','.join(header)}, got {','.join(first)}")
    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        yield reader.line_num, [cell.strip() for cell in row]


def _float(text: str, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"{name} {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ValidationError(f"{name} {text!r} is not finite")
    return value


def _num(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


# -- CI series -------------------------------------------------------------


@_structured
def parse_ci_csv(
    data: bytes | str, region: str = "", hold_s: Optional[float] = None
) -> tuple[CarbonIntensitySeries, ParseReport]:
    """Parse a ``timestamp,ci_g_per_kwh`` file.

    Malformed rows, negative values and repeated timestamps are rejected
    and reported; a timestamp earlier than its predecessor aborts parsing.
    """
    report = ParseReport()
    points: list[tuple[float, float]] = []
    for line, row in _rows(_text(data), CI_HEADER):
        if len(row) != 2:
            report.reject(line, f"expected 2 fields, got {len(row)}")
            continue
        try:
            t = parse_timestamp(row[0])
            ci = _float(row[1], "ci_g_per_kwh")
        except ValidationError as exc:
            report.reject(line, str(exc))
            continue
        if ci < 0:
            report.reject(line, f"negative carbon intensity {ci}")
            continue
        if points and t == points[-1][0]:
            report.reject(line, f"duplicate timestamp {row[0]}")
            continue
        if points and t < points[-1][0]:
            raise ValidationError(f"line {line}: timestamp {row[0]} is earlier than the previous row")
        points.append((t, ci))
        report.accepted += 1
    if not points:
        raise ValidationError("no valid rows in carbon intensity file")
    return CarbonIntensitySeries(region, tuple(points), hold_s), report


def dump_ci_csv(series: CarbonIntensitySeries) -> str:
    lines = [",".join(CI_HEADER)]
    lines += [f"{format_timestamp(t)},{_num(ci)}" for t, ci in series.points]
    return "\n".join(lines) + "\n"


# -- energy mix ------------------------------------------------------------


@_structured
def parse_mix_csv(data: bytes | str) -> tuple[list[EnergyMixSnapshot], ParseReport]:
    """Parse a long-format ``timestamp,source,share`` file into snapshots.

    Rows sharing a timestamp form one snapshot and must be contiguous. A
    snapshot whose shares do not sum to 1 is dropped with all its rows.
    """
    report = ParseReport()
    groups: list[tuple[float, list[tuple[int, str, float]]]] = []
    for line, row in _rows(_text(data), MIX_HEADER):
        if len(row) != 3:
            report.reject(line, f"expected 3 fields, got {len(row)}")
            continue
        try:
            t = parse_timestamp(row[0])
            share = _float(row[2], "share")
        except ValidationError as exc:
            report.reject(line, str(exc))
            continue
        source = row[1]
        if not source:
            report.reject(line, "empty source name")
            continue
        if not 0.0 <= share <= 1.0:
            report.reject(line, f"share {share} outside [0, 1]")
            continue
        if groups and t < groups[-1][0]:
            raise ValidationError(f"line {line}: timestamp {row[0]} is earlier than the previous snapshot")
        if not groups or t > groups[-1][0]:
            groups.append((t, []))
        members = groups[-1][1]
        if any(src == source for _, src, _ in members):
            report.reject(line, f"duplicate source {source!r} at {row[0]}")
            continue
        members.append((line, source, share))

    snapshots = []
    for t, members in groups:
        if not members:
            continue
        try:
            snap = EnergyMixSnapshot(t, {src: share for _, src, share in members})
        except ValidationError as exc:
            for line, _, _ in members:
                report.reject(line, f"snapshot {format_timestamp(t)} rejected: {exc}")
            continue
        snapshots.append(snap)
        report.accepted += len(members)
    report.rejected.sort()
    return snapshots, report


def dump_mix_csv(snapshots: Iterable[EnergyMixSnapshot]) -> str:
    lines = [",".join(MIX_HEADER)]
    for snap in snapshots:
        ts = format_timestamp(snap.timestamp)
        lines += [f"{ts},{src},{_num(share)}" for src, share in snap.shares.items()]
    return "\n".join(lines) + "\n"


# -- coefficients ----------------------------------------------------------


@_structured
def parse_coefficients_csv(data: bytes | str) -> SourceCoefficients:
    values: dict[str, float] = {}
    for line, row in _rows(_text(data), COEFF_HEADER):
        if len(row) != 2:
            raise ValidationError(f"line {line}: expected 2 fields, got {len(row)}")
        source, raw = row
        if not source:
            raise ValidationError(f"line {line}: empty source name")
        if source in values:
            raise ValidationError(f"line {line}: duplicate source {source!r}")
        value = _float(raw, "ci_g_per_kwh")
        if value < 0:
            raise ValidationError(f"line {line}: negative coefficient for {source!r}")
        values[source] = value
    if not values:
        raise ValidationError("coefficients file has no rows")
    return SourceCoefficients(values)


def dump_coefficients_csv(coeffs: SourceCoefficients) -> str:
    lines = [",".join(COEFF_HEADER)] + [f"{src},{_num(ci)}" for src, ci in coeffs.values.items()]
    return "\n".join(lines) + "\n"


# -- model profiles --------------------------------------------------------


@_structured
def parse_model_profiles(data: bytes | str) -> list[ModelProfile]:
    profiles = []
    names = set()
    for line, row in _rows(_text(data), PROFILE_HEADER):
        if len(row) != len(PROFILE_HEADER):
            raise ValidationError(f"line {line}: expected {len(PROFILE_HEADER)} fields, got {len(row)}")
        name, *numbers = row
        if name in names:
            raise ValidationError(f"line {line}: duplicate model {name!r}")
        names.add(name)
        try:
            values = [_float(x, col) for x, col in zip(numbers, PROFILE_HEADER[1:])]
            profiles.append(ModelProfile(name, *values))
        except ValidationError as exc:
            raise ValidationError(f"line {line}: {exc}") from None
    if not profiles:
        raise ValidationError("model profile file has no rows")
    return profiles


def dump_model_profiles(profiles: Iterable[ModelProfile]) -> str:
    lines = [",".join(PROFILE_HEADER)]
    for p in profiles:
        cells = [p.name, p.params_millions, p.size_mb, p.accuracy_pct, p.mean_inference_ms, p.energy_wh_per_5k]
        lines.append(",".join([cells[0], *(_num(c) for c in cells[1:])]))
    return "\n".join(lines) + "\n"


# -- JSON documents --------------------------------------------------------


def _document(data: bytes | str, kind: str) -> dict:
    doc = json.loads(_text(data))
    if not isinstance(doc, dict):
        raise ValidationError(f"{kind} document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{kind} document: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return doc


def _keys(doc: dict, kind: str, required: set[str], optional: set[str] = frozenset()) -> None:
    missing = required - doc.keys()
    if missing:
        raise ValidationError(f"{kind}: missing field(s) {', '.join(sorted(missing))}")
    extra = doc.keys() - required - optional
    if extra:
        raise ValidationError(f"{kind}: unknown field(s) {', '.join(sorted(extra))}")


def _real(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite")
    return float(value)


@_structured
def parse_power_model(data: bytes | str) -> PowerModel:
    doc = _document(data, "power model")
    _keys(doc, "power model", {"schema_version", "device_name", "idle_watts", "max_watts", "points"}, {"facility_housed"})
    if not isinstance(doc["points"], list) or not doc["points"]:
        raise ValidationError("power model: points must be a non-empty list")
    points = []
    for i, p in enumerate(doc["points"]):
        if not isinstance(p, dict):
            raise ValidationError(f"power model: point {i} must be an object")
        _keys(p, f"power model point {i}", {"utilization", "watts"})
        points.append((_real(p["utilization"], "utilization"), _real(p["watts"], "watts")))
    us = [u for u, _ in points]
    if len(set(us)) != len(us):
        raise ValidationError("power model: duplicate utilization points")
    housed = doc.get("facility_housed", False)
    if not isinstance(housed, bool):
        raise ValidationError("power model: facility_housed must be true or false")
    if not isinstance(doc["device_name"], str):
        raise ValidationError("power model: device_name must be a string")
    return PowerModel(
        doc["device_name"],
        _real(doc["idle_watts"], "idle_watts"),
        tuple(points),
        _real(doc["max_watts"], "max_watts"),
        housed,
    )


def dump_power_model(model: PowerModel) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "device_name": model.device_name,
        "idle_watts": model.idle_watts,
        "max_watts": model.max_watts,
        "facility_housed": model.facility_housed,
        "points": [{"utilization": u, "watts": w} for u, w in model.points],
    }
    return json.dumps(doc, indent=2) + "\n"


def _read(base: Path, ref: Any, what: str) -> bytes:
    if not isinstance(ref, str) or not ref:
        raise ValidationError(f"{what}: file reference must be a non-empty string")
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    try:
        return path.read_bytes()
    except OSError as exc:
        raise ValidationError(f"{what}: cannot read {path}: {exc.strerror or exc}") from None


def _log_rejections(path: str, report: ParseReport) -> None:
    for line, reason in report.rejected:
        log.warning("%s:%d: row rejected: %s", path, line, reason)


def parse_grid(spec: Any, base_path: Path | str = ".") -> GridProfile:
    """Build a grid from a scenario-style grid object.

    Accepts ``{"region", "constant_ci"}``, ``{"region", "ci_csv"}`` or
    ``{"region", "mix_csv", "coefficients_csv"}``.
    """
    base = Path(base_path)
    if not isinstance(spec, dict):
        raise ValidationError("grid must be an object")
    region = spec.get("region")
    if not isinstance(region, str) or not region:
        raise ValidationError("grid: region must be a non-empty string")
    sources = [k for k in ("constant_ci", "ci_csv", "mix_csv") if k in spec]
    if len(sources) != 1:
        raise ValidationError(f"grid {region}: give exactly one of constant_ci, ci_csv, mix_csv")
    if "constant_ci" in spec:
        _keys(spec, f"grid {region}", {"region", "constant_ci"}, {"start"})
        start = parse_timestamp(spec["start"]) if "start" in spec else 0.0
        return GridProfile.constant(region, _real(spec["constant_ci"], "constant_ci"), start)
    if "ci_csv" in spec:
        _keys(spec, f"grid {region}", {"region", "ci_csv"}, {"hold_s"})
        hold = _real(spec["hold_s"], "hold_s") if "hold_s" in spec else None
        series, report = parse_ci_csv(_read(base, spec["ci_csv"], f"grid {region}"), region, hold)
        _log_rejections(spec["ci_csv"], report)
        return GridProfile(region, ci_series=series)
    _keys(spec, f"grid {region}", {"region", "mix_csv", "coefficients_csv"})
    snapshots, report = parse_mix_csv(_read(base, spec["mix_csv"], f"grid {region}"))
    _log_rejections(spec["mix_csv"], report)
    if not snapshots:
        raise ValidationError(f"grid {region}: no valid snapshots in {spec['mix_csv']}")
    coeffs = parse_coefficients_csv(_read(base, spec["coefficients_csv"], f"grid {region}"))
    return GridProfile(region, mix=tuple(snapshots), coefficients=coeffs)


def _profile(value: Any, where: str) -> tuple[tuple[float, float], ...]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return ((0.0, _real(value, where)),)
    if not isinstance(value, list) or not value:
        raise ValidationError(f"{where}: utilization must be a number or a list of [offset_s, utilization]")
    pts = []
    for p in value:
        if not isinstance(p, list) or len(p) != 2:
            raise ValidationError(f"{where}: profile entries must be [offset_s, utilization]")
        pts.append((_real(p[0], "offset_s"), _real(p[1], "utilization")))
    return tuple(pts)


_TASK_FIELDS = {
    "training": ({"id", "kind", "duration_s", "utilization"}, {"start_offset_s"}),
    "inference": ({"id", "kind", "model", "items"}, {"start_offset_s", "device"}),
    "transfer": (
        {"id", "kind", "bytes", "bandwidth_bps"},
        {"start_offset_s", "device", "efficiency", "joules_per_bit"},
    ),
}


def _task(doc: Any, profiles: dict[str, ModelProfile]) -> Task:
    if not isinstance(doc, dict):
        raise ValidationError("task must be an object")
    kind = doc.get("kind")
    if kind not in _TASK_FIELDS:
        raise ValidationError(f"task {doc.get('id')!r}: kind must be one of {', '.join(_TASK_FIELDS)}")
    required, optional = _TASK_FIELDS[kind]
    _keys(doc, f"task {doc.get('id')!r}", required, optional)
    tid = doc["id"]
    if not isinstance(tid, str):
        raise ValidationError("task id must be a string")
    offset = _real(doc.get("start_offset_s", 0.0), f"task {tid} start_offset_s")
    device = doc.get("device")
    if device is not None and not isinstance(device, str):
        raise ValidationError(f"task {tid}: device must be a string")
    if kind == "training":
        util = doc["utilization"]
        if not isinstance(util, dict) or not util:
            raise ValidationError(f"task {tid}: utilization must map device names to profiles")
        return Task(
            tid,
            kind,
            offset,
            duration_s=_real(doc["duration_s"], f"task {tid} duration_s"),
            utilization={dev: _profile(p, f"task {tid} device {dev}") for dev, p in util.items()},
        )
    if kind == "inference":
        name = doc["model"]
        if not isinstance(name, str) or name not in profiles:
            raise ValidationError(f"task {tid}: unknown model {name!r} (is model_profiles set?)")
        items = doc["items"]
        if isinstance(items, bool) or not isinstance(items, int):
            raise ValidationError(f"task {tid}: items must be an integer")
        return Task(tid, kind, offset, device=device, model=profiles[name], item_count=items)
    n_bytes = doc["bytes"]
    if isinstance(n_bytes, bool) or not isinstance(n_bytes, int):
        raise ValidationError(f"task {tid}: bytes must be an integer")
    return Task(
        tid,
        kind,
        offset,
        device=device,
        n_bytes=n_bytes,
        bandwidth_bps=_real(doc["bandwidth_bps"], f"task {tid} bandwidth_bps"),
        efficiency=_real(doc.get("efficiency", DEFAULT_TRANSFER_EFFICIENCY), f"task {tid} efficiency"),
        joules_per_bit=_real(doc.get("joules_per_bit", 0.0), f"task {tid} joules_per_bit"),
    )


@_structured
def parse_scenario(data: bytes | str, base_path: Path | str = ".") -> Scenario:
    """Load a scenario document, resolving file references against ``base_path``.

    Coverage of the workload horizon by the grid is checked here, before any
    estimation runs.
    """
    base = Path(base_path)
    doc = _document(data, "scenario")
    _keys(
        doc,
        "scenario",
        {"schema_version", "anchor_time", "facility", "devices", "grid", "tasks"},
        {"model_profiles", "description"},
    )
    if not isinstance(doc["anchor_time"], str):
        raise ValidationError("scenario: anchor_time must be an ISO-8601 string")
    anchor = parse_timestamp(doc["anchor_time"])

    fac = doc["facility"]
    if not isinstance(fac, dict):
        raise ValidationError("scenario: facility must be an object")
    _keys(fac, "facility", {"name", "pue"})
    if not isinstance(fac["name"], str):
        raise ValidationError("facility: name must be a string")
    facility = FacilityProfile(fac["name"], _real(fac["pue"], "pue"))

    if not isinstance(doc["devices"], list):
        raise ValidationError("scenario: devices must be a list of power-model file paths")
    devices: dict[str, PowerModel] = {}
    for ref in doc["devices"]:
        model = parse_power_model(_read(base, ref, "devices"))
        if model.device_name in devices:
            raise ValidationError(f"scenario: device {model.device_name!r} defined twice")
        devices[model.device_name] = model

    profiles: dict[str, ModelProfile] = {}
    if "model_profiles" in doc:
        for p in parse_model_profiles(_read(base, doc["model_profiles"], "model_profiles")):
            profiles[p.name] = p

    if not isinstance(doc["tasks"], list):
        raise ValidationError("scenario: tasks must be a list")
    workload = WorkloadTrace(tuple(_task(t, profiles) for t in doc["tasks"]))
    grid = parse_grid(doc["grid"], base)
    return Scenario(devices, facility, grid, workload, anchor)


def load_scenario(path: Path | str) -> Scenario:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {path}: {exc.strerror or exc}") from None
    try:
        return parse_scenario(data, path.parent)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


@_structured
def parse_resource_sweep(data: bytes | str, base_path: Path | str = ".") -> list[ResourceConfig]:
    """Load a resource-capping document.

    Each config names a power-model file and either ``utilization`` or
    ``cores`` with ``total_cores``; ``inference_ms`` is the measured latency.
    """
    base = Path(base_path)
    doc = _document(data, "resource sweep")
    _keys(doc, "resource sweep", {"schema_version", "configs"}, {"description"})
    if not isinstance(doc["configs"], list) or not doc["configs"]:
        raise ValidationError("resource sweep: configs must be a non-empty list")
    models: dict[str, PowerModel] = {}
    configs = []
    for i, c in enumerate(doc["configs"]):
        if not isinstance(c, dict):
            raise ValidationError(f"resource sweep: config {i} must be an object")
        _keys(c, f"config {i}", {"label", "power_model", "inference_ms"}, {"utilization", "cores", "total_cores"})
        if not isinstance(c["label"], str) or not c["label"]:
            raise ValidationError(f"config {i}: label must be a non-empty string")
        ref = c["power_model"]
        if ref not in models:
            models[ref] = parse_power_model(_read(base, ref, f"config {c['label']}"))
        if "utilization" in c:
            if "cores" in c or "total_cores" in c:
                raise ValidationError(f"config {c['label']}: give utilization or cores/total_cores, not both")
            util = _real(c["utilization"], "utilization")
        elif "cores" in c:
            cores = _real(c["cores"], "cores")
            total = _real(c.get("total_cores"), "total_cores")
            if not 0 < cores <= total:
                raise ValidationError(f"config {c['label']}: need 0 < cores <= total_cores")
            util = cores / total
        else:
            util = 1.0
        configs.append(ResourceConfig(c["label"], models[ref], _real(c["inference_ms"], "inference_ms"), util))
    return configs


# -- bundled fixtures ------------------------------------------------------


def data_path(name: str = "") -> Path:
    """Filesystem path of a bundled fixture file (or the data directory)."""
    root = Path(str(resources.files("edgecarbon") / "data"))
    return root / name if name else root


def load_model_profiles() -> list[ModelProfile]:
    return parse_model_profiles(data_path("model_profiles.csv").read_bytes())


def load_power_model(name: str) -> PowerModel:
    """Bundled power model by file stem, e.g. ``"server_r610"`` or ``"rpi4"``."""
    return parse_power_model(data_path(f"power_models/{name}.json").read_bytes())


def load_coefficients() -> SourceCoefficients:
    return parse_coefficients_csv(data_path("source_coefficients.csv").read_bytes())


def load_ci_day(region: str) -> CarbonIntensitySeries:
    """Synthetic one-day CI series, ``"CY"`` or ``"SE"``."""
    series, _ = parse_ci_csv(data_path(f"ci_{region.lower()}_synthetic_day.csv").read_bytes(), region)
    return series


def load_mix_day(region: str = "CY") -> list[EnergyMixSnapshot]:
    snapshots, _ = parse_mix_csv(data_path(f"mix_{region.lower()}_synthetic_day.csv").read_bytes())
    return snapshots
