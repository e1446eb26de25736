"""Regenerate the synthetic one-day grid fixtures in src/edgecarbon/data.

Neither curve is measured data. The Cyprus day has oil-dominated generation
with a solar share rising from zero at 02:30 UTC to 0.8 at 09:45 UTC and back
to zero at 17:00 UTC (roughly sunrise to sunset in June, local time UTC+3).
The Sweden day is flat around 13 gCO2eq/kWh with a small daily swing.

    python scripts/generate_fixtures.py
"""

from __future__ import annotations

import math
from datetime import datetime, timedelta, timezone
from pathlib import Path

from edgecarbon.carbon import EnergyMixSnapshot, build_ci_series
from edgecarbon.ingest import dump_ci_csv, dump_mix_csv, load_coefficients
from edgecarbon.carbon import CarbonIntensitySeries

DATA = Path(__file__).resolve().parent.parent / "src" / "edgecarbon" / "data"
DAY = datetime(2022, 6, 1, tzinfo=timezone.utc)
STEP = timedelta(minutes=15)
SUNRISE_H, SUNSET_H, PEAK_SOLAR = 2.5, 17.0, 0.8


def cyprus_mix() -> list[EnergyMixSnapshot]:
    snaps = []
    for k in range(96):
        t = DAY + k * STEP
        h = k / 4
        solar = 0.0
        if SUNRISE_H < h < SUNSET_H:
            solar = round(PEAK_SOLAR * math.sin(math.pi * (h - SUNRISE_H) / (SUNSET_H - SUNRISE_H)), 4)
        wind = round(0.05 + 0.02 * math.cos(2 * math.pi * (h - 3) / 24), 4)
        oil = round(1.0 - solar - wind, 4)
        shares = {"oil": oil, "wind": wind}
        if solar > 0:
            shares["solar"] = solar
        snaps.append(EnergyMixSnapshot(t.timestamp(), shares))
    return snaps


def sweden_ci() -> CarbonIntensitySeries:
    pts = []
    for k in range(96):
        t = DAY + k * STEP
        h = k / 4
        pts.append((t.timestamp(), round(13.0 + 1.5 * math.sin(2 * math.pi * (h - 6) / 24), 2)))
    return CarbonIntensitySeries("SE", tuple(pts))


def main() -> None:
    mix = cyprus_mix()
    ci = build_ci_series(mix, load_coefficients(), region="CY")
    ci = CarbonIntensitySeries("CY", tuple((t, round(v, 2)) for t, v in ci.points))
    (DATA / "mix_cy_synthetic_day.csv").write_text(dump_mix_csv(mix))
    (DATA / "ci_cy_synthetic_day.csv").write_text(dump_ci_csv(ci))
    (DATA / "ci_se_synthetic_day.csv").write_text(dump_ci_csv(sweden_ci()))


if __name__ == "__main__":
    main()
