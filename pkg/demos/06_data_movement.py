"""Moving a dataset to the edge before training.

Shipping 144 GB over a 100 Mbps link takes hours, which pushes the training
job later in the day. The pipeline scenario chains a transfer, a
training run on a server with a GPU and a batch of inferences.
"""

from edgecarbon import estimate, transfer_duration
from edgecarbon.ingest import data_path, load_scenario

print(f"raw link:      {transfer_duration(144_000_000_000, 100e6, efficiency=1.0) / 3600:.2f} h")
print(f"with overhead: {transfer_duration(144_000_000_000, 100e6) / 3600:.2f} h")

#%% The whole pipeline on the Cyprus-like mix
report = estimate(load_scenario(data_path("scenarios/edge_pipeline.json")))
for t in report.tasks:
    print(f"{t.task_id:15s} {t.kind.value:9s} {t.energy.wh:8.1f} Wh {t.emissions.grams:8.1f} g  ({len(t.segments)} CI segments)")
print(f"{'total':15s} {'':9s} {report.total_energy.wh:8.1f} Wh {report.total_emissions.grams:8.1f} g")
