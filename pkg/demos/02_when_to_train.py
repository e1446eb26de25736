"""Choosing a start time on a solar-heavy grid.

The bundled Cyprus-like day dips around midday when solar output peaks.
Sliding the same training job across 24 hourly start times shows how much
the choice of start time alone is worth.
"""

from dataclasses import replace

from edgecarbon import GridProfile, TimeInterval, sweep_start_time
from edgecarbon.carbon import tile_daily
from edgecarbon.ingest import data_path, load_ci_day, load_scenario

base = load_scenario(data_path("scenarios/reference.json"))
# two copies of the day so late starts can run past midnight
grid = GridProfile("CY", ci_series=tile_daily(load_ci_day("CY"), 2))
scenario = replace(base, grid=grid)

day = TimeInterval(base.anchor_time, base.anchor_time + 86400)
result = sweep_start_time(scenario, day, step_s=3600)

#%% Emissions by start hour (UTC)
for c in result:
    bar = "#" * int(c.report.total_emissions.grams / 50)
    print(f"{c.label[11:16]}  {c.report.total_emissions.grams:7.1f} g  {bar}")

worst = max(result, key=lambda c: c.report.total_emissions.grams)
print(f"\nbest start {result.best.label}, worst {worst.label}")
print(f"saving: {1 - result.best.report.total_emissions.grams / worst.report.total_emissions.grams:.0%}")
