"""Same job, different regions.

Average grid intensities differ by well over an order of magnitude across
Europe, so moving a job can matter more than tuning it.
"""

from edgecarbon import GridProfile, compare_locations, relative_reduction
from edgecarbon.ingest import data_path, load_scenario

scenario = load_scenario(data_path("scenarios/reference.json"))
grids = [GridProfile.constant(r, ci) for r, ci in (("CY", 621), ("DE", 311), ("FR", 56), ("SE", 13))]

result = compare_locations(scenario, grids)
ranked = sorted(result, key=lambda c: c.report.total_emissions.grams)
worst = ranked[-1].report.total_emissions

for c in ranked:
    g = c.report.total_emissions
    print(f"{c.label}: {g.grams:7.1f} g  ({relative_reduction(worst, g):5.1f} % below {ranked[-1].label})")
