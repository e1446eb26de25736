"""Command-line front end.

Exit codes: 0 success, 2 input or validation error, 3 coverage error.
All computation is UTC; ``--timezone`` only changes how times are printed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence
from zoneinfo import ZoneInfo, ZoneInfoNotFoundError

from .carbon import AVERAGE_CI_DISCLAIMER, GridProfile
from .errors import CoverageError, EdgeCarbonError, ValidationError
from .ingest import load_scenario, parse_ci_csv, parse_model_profiles, parse_resource_sweep
from .scenario import (
    compare_locations,
    compare_models,
    estimate,
    pareto_front,
    relative_reduction,
    sweep_resources,
    sweep_start_time,
)
from .units import TimeInterval, parse_timestamp

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COVERAGE = 3

FORMATS = ("table", "csv", "json")
MODEL_OBJECTIVES = (("accuracy_pct", "max"), ("duration_s", "min"), ("energy_wh", "min"))

_DURATION = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([smhd]?)\s*$")
_UNIT_S = {"": 1, "s": 1, "m": 60, "h": 3600, "d": 86400}


def _sig(x: float) -> float:
    """Round to 6 significant digits so JSON output is stable."""
    return float(f"{x:.6g}")


def parse_duration(text: str) -> float:
    """``"3600"``, ``"90m"``, ``"1.5h"`` or ``"1d"`` to seconds."""
    m = _DURATION.match(text)
    if not m:
        raise ValidationError(f"cannot parse duration {text!r} (use e.g. 3600, 15m, 1h, 1d)")
    seconds = float(m.group(1)) * _UNIT_S[m.group(2)]
    if seconds <= 0:
        raise ValidationError(f"duration must be positive, got {text!r}")
    return seconds


def _zone(name: str):
    if name.upper() == "UTC":
        return timezone.utc
    try:
        return ZoneInfo(name)
    except (ZoneInfoNotFoundError, ValueError) as exc:
        raise ValidationError(f"unknown timezone {name!r}") from exc


def _show_time(t: float, tz) -> str:
    return datetime.fromtimestamp(t, tz=timezone.utc).astimezone(tz).isoformat()


def parse_grid_arg(text: str) -> GridProfile:
    """``REGION=CI`` (constant), ``REGION=path.csv`` or ``path.csv`` (region from file stem)."""
    region, sep, rest = text.partition("=")
    if not sep:
        region, rest = Path(text).stem, text
    if not region:
        raise ValidationError(f"grid {text!r}: empty region name")
    try:
        return GridProfile.constant(region, float(rest))
    except ValueError:
        pass
    path = Path(rest)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read grid file {path}: {exc.strerror or exc}") from None
    series, report = parse_ci_csv(data, region)
    for line, reason in report.rejected:
        logging.getLogger(__name__).warning("%s:%d: row rejected: %s", path, line, reason)
    return GridProfile(region, ci_series=series)


def _render(fmt: str, columns: Sequence[str], rows: list[list[Any]], doc: dict, footer: str = "") -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buf.getvalue()
    cells = [[c if isinstance(c, str) else f"{c:.6g}" for c in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(columns)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    if footer:
        lines += ["", footer]
    return "\n".join(lines) + "\n"


def cmd_estimate(args: argparse.Namespace) -> str:
    tz = _zone(args.timezone)
    report = estimate(load_scenario(args.scenario))
    tasks = [
        {
            "id": t.task_id,
            "kind": t.kind.value,
            "start": _show_time(t.interval.start, tz),
            "end": _show_time(t.interval.end, tz),
            "energy_kwh": _sig(t.energy.kwh),
            "emissions_g": _sig(t.emissions.grams),
        }
        for t in report.tasks
    ]
    doc = {
        "command": "estimate",
        "total_energy_kwh": _sig(report.total_energy.kwh),
        "total_emissions_g": _sig(report.total_emissions.grams),
        "tasks": tasks,
        "disclaimer": report.disclaimer,
    }
    columns = ["task", "kind", "start", "end", "energy_kwh", "emissions_g"]
    rows = [[t["id"], t["kind"], t["start"], t["end"], t["energy_kwh"], t["emissions_g"]] for t in tasks]
    rows.append(["TOTAL", "", "", "", doc["total_energy_kwh"], doc["total_emissions_g"]])
    return _render(args.format, columns, rows, doc, report.disclaimer)


def _window(text: Optional[str], anchor: float) -> TimeInterval:
    if text is None:
        return TimeInterval(anchor, anchor + 86400.0)
    if "/" in text:
        start, _, end = text.partition("/")
        return TimeInterval(parse_timestamp(start), parse_timestamp(end))
    return TimeInterval(anchor, anchor + parse_duration(text))


def cmd_sweep_time(args: argparse.Namespace) -> str:
    tz = _zone(args.timezone)
    scenario = load_scenario(args.scenario)
    window = _window(args.window, scenario.anchor_time)
    result = sweep_start_time(scenario, window, parse_duration(args.step))
    candidates = [
        {
            "start": _show_time(c.value, tz),
            "energy_kwh": _sig(c.report.total_energy.kwh),
            "emissions_g": _sig(c.report.total_emissions.grams),
            "best": i == result.best_index,
        }
        for i, c in enumerate(result)
    ]
    doc = {
        "command": "sweep-time",
        "best_start": candidates[result.best_index]["start"],
        "candidates": candidates,
        "disclaimer": AVERAGE_CI_DISCLAIMER,
    }
    columns = ["start", "energy_kwh", "emissions_g", "best"]
    rows = [[c["start"], c["energy_kwh"], c["emissions_g"], "*" if c["best"] else ""] for c in candidates]
    return _render(args.format, columns, rows, doc, AVERAGE_CI_DISCLAIMER)


def cmd_compare_locations(args: argparse.Namespace) -> str:
    scenario = load_scenario(args.scenario)
    grids = [parse_grid_arg(g) for g in args.grid] if args.grid else [scenario.grid]
    result = compare_locations(scenario, grids)
    worst = max(c.report.total_emissions.grams for c in result)
    order = sorted(range(len(result)), key=lambda i: result.candidates[i].report.total_emissions.grams)
    ranking = []
    for rank, i in enumerate(order, start=1):
        c = result.candidates[i]
        grams = c.report.total_emissions.grams
        ranking.append(
            {
                "rank": rank,
                "region": c.label,
                "energy_kwh": _sig(c.report.total_energy.kwh),
                "emissions_g": _sig(grams),
                "reduction_vs_worst_pct": _sig(relative_reduction(worst, grams)) if worst > 0 else 0.0,
                "best": i == result.best_index,
            }
        )
    doc = {"command": "compare-locations", "best": result.best.label, "ranking": ranking,
           "disclaimer": AVERAGE_CI_DISCLAIMER}
    columns = ["rank", "region", "energy_kwh", "emissions_g", "reduction_vs_worst_pct"]
    rows = [[str(r["rank"]), r["region"], r["energy_kwh"], r["emissions_g"], r["reduction_vs_worst_pct"]]
            for r in ranking]
    return _render(args.format, columns, rows, doc, AVERAGE_CI_DISCLAIMER)


def _read_arg(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None


def cmd_compare_models(args: argparse.Namespace) -> str:
    profiles = parse_model_profiles(_read_arg(args.profiles))
    grid = parse_grid_arg(args.grid)
    at = parse_timestamp(args.at) if args.at else grid.series.start
    rows_ = compare_models(profiles, args.items, grid, at)
    metrics = [r.metrics() for r in rows_]
    front = {id(m) for m in pareto_front(metrics, MODEL_OBJECTIVES)} if args.pareto else set()
    models = []
    for r, m in zip(rows_, metrics):
        entry = {
            "name": r.name,
            "accuracy_pct": _sig(r.accuracy_pct),
            "duration_s": _sig(r.duration_s),
            "energy_wh": _sig(r.energy.wh),
            "emissions_g": _sig(r.emissions.grams),
        }
        if args.pareto:
            entry["pareto"] = "front" if id(m) in front else "dominated"
        models.append(entry)
    doc = {"command": "compare-models", "items": args.items, "grid": grid.region, "models": models}
    if args.pareto:
        doc["objectives"] = [f"{m}:{d}" for m, d in MODEL_OBJECTIVES]
    columns = ["model", "accuracy_pct", "duration_s", "energy_wh", "emissions_g"] + (["pareto"] if args.pareto else [])
    rows = [[e["name"], e["accuracy_pct"], e["duration_s"], e["energy_wh"], e["emissions_g"]]
            + ([e["pareto"]] if args.pareto else []) for e in models]
    return _render(args.format, columns, rows, doc)


def cmd_sweep_resources(args: argparse.Namespace) -> str:
    path = Path(args.models)
    configs = parse_resource_sweep(_read_arg(args.models), path.parent)
    results = sweep_resources(configs, args.items)
    entries = [
        {
            "label": r.label,
            "duration_s": _sig(r.duration_s),
            "energy_j": _sig(r.energy.joules),
            "mean_power_w": _sig(r.mean_power.watts),
        }
        for r in results
    ]
    doc = {"command": "sweep-resources", "items": args.items, "configs": entries}
    columns = ["config", "duration_s", "energy_j", "mean_power_w"]
    rows = [[e["label"], e["duration_s"], e["energy_j"], e["mean_power_w"]] for e in entries]
    return _render(args.format, columns, rows, doc)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgecarbon",
        description="Estimate energy and carbon emissions of AI workloads on edge infrastructure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, tz: bool = False) -> None:
        p.add_argument("--format", choices=FORMATS, default="table")
        if tz:
            p.add_argument("--timezone", default="UTC", help="IANA zone for displayed times (default UTC)")

    p = sub.add_parser("estimate", help="energy and emissions of a scenario")
    p.add_argument("scenario")
    common(p, tz=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep-time", help="emissions for every start time in a window")
    p.add_argument("scenario")
    p.add_argument("--window", help="duration from the scenario anchor (e.g. 24h) or START/END ISO timestamps")
    p.add_argument("--step", default="1h", help="spacing of candidate start times (default 1h)")
    common(p, tz=True)
    p.set_defaults(func=cmd_sweep_time)

    p = sub.add_parser("compare-locations", help="run the scenario against several grids")
    p.add_argument("scenario")
    p.add_argument("--grid", action="append", help="REGION=CI, REGION=ci.csv or ci.csv; repeatable")
    common(p)
    p.set_defaults(func=cmd_compare_locations)

    p = sub.add_parser("compare-models", help="energy and emissions per model architecture")
    p.add_argument("profiles")
    p.add_argument("--items", type=_positive_int, default=5000)
    p.add_argument("--grid", required=True, help="REGION=CI, REGION=ci.csv or ci.csv")
    p.add_argument("--at", help="ISO timestamp the batch starts (default: grid start)")
    p.add_argument("--pareto", action="store_true", help="mark rows dominated on accuracy/latency/energy")
    common(p)
    p.set_defaults(func=cmd_compare_models)

    p = sub.add_parser("sweep-resources", help="duration, energy and power per resource configuration")
    p.add_argument("models")
    p.add_argument("--items", type=_positive_int, default=1)
    common(p)
    p.set_defaults(func=cmd_sweep_resources)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="edgecarbon: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except CoverageError as exc:
        print(f"edgecarbon: coverage error: {exc}", file=sys.stderr)
        return EXIT_COVERAGE
    except EdgeCarbonError as exc:
        print(f"edgecarbon: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
