"""Accuracy against energy for three image classifiers.

Each profile gives the energy to classify 5000 images. A smaller network
gives up a few points of accuracy for a large energy cut, and the Pareto
front shows which trade-offs are worth considering at all.
"""

from edgecarbon import GridProfile, compare_models, pareto_front, relative_reduction
from edgecarbon.ingest import load_model_profiles
from edgecarbon.units import parse_timestamp

rows = compare_models(load_model_profiles(), 5000, GridProfile.constant("CY", 621), parse_timestamp("2022-06-01T00:00:00Z"))

#%% Side by side
for r in rows:
    print(f"{r.name:12s} acc {r.accuracy_pct:5.1f} %  {r.energy.wh:6.1f} Wh  {r.emissions.grams:6.1f} g  {r.duration_s:6.0f} s")

energy = {r.name: r.energy.wh for r in rows}
print(f"\nResNet50 -> MobileNetV2 saves {relative_reduction(energy['ResNet50'], energy['MobileNetV2']):.1f} % energy")

#%% Non-dominated models
metrics = [dict(r.metrics(), name=r.name) for r in rows]
front = pareto_front(metrics, [("accuracy_pct", "max"), ("duration_s", "min"), ("energy_wh", "min")])
print("Pareto front:", [m["name"] for m in front])
