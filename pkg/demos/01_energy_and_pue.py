"""Energy and emissions of a single training run on an edge micro data centre.

A 400 W node trains for four and a half hours in a facility with PUE 2.0.
We estimate the energy, then charge it against two very different grids.
"""

from edgecarbon import (
    FacilityProfile,
    GridProfile,
    PowerModel,
    Scenario,
    Task,
    WorkloadTrace,
    estimate,
)
from edgecarbon.units import parse_timestamp

node = PowerModel.constant("node", 400, facility_housed=True)
facility = FacilityProfile("edge-dc", pue=2.0)
train = Task("train", "training", duration_s=4.5 * 3600, utilization={"node": ((0.0, 1.0),)})
anchor = parse_timestamp("2022-06-01T00:00:00Z")

#%% One run, two grids
for region, ci in (("CY", 621), ("SE", 13)):
    scenario = Scenario({"node": node}, facility, GridProfile.constant(region, ci), WorkloadTrace((train,)), anchor)
    report = estimate(scenario)
    print(f"{region}: {report.total_energy.kwh:.2f} kWh -> {report.total_emissions.grams:8.1f} g CO2eq")

#%% Without the facility overhead the IT energy alone is half of that
bare = Scenario({"node": node}, FacilityProfile("none", 1.0), GridProfile.constant("CY", 621), WorkloadTrace((train,)), anchor)
print("IT energy only:", round(estimate(bare).total_energy.kwh, 3), "kWh")

print()
print(report.disclaimer)
