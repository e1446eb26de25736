"""Capping cores on a server and on a single-board computer.

Fewer cores lower the power draw but stretch the runtime. Whether the
energy per inference goes up or down depends on the device's load curve.
"""

import numpy as np

from edgecarbon import power_at, sweep_resources
from edgecarbon.ingest import data_path, load_power_model, parse_resource_sweep

#%% The two measured load curves
for name in ("server_r610", "rpi4"):
    model = load_power_model(name)
    u = np.linspace(0, 1, 9)
    print(name.ljust(12), " ".join(f"{power_at(model, x).watts:6.1f}" for x in u))

#%% Energy per inference for each configuration
path = data_path("resource_sweep.json")
configs = parse_resource_sweep(path.read_bytes(), path.parent)
for row in sweep_resources(configs, item_count=1):
    print(f"{row.label:18s} {row.duration_s * 1000:5.0f} ms  {row.mean_power.watts:6.1f} W  {row.energy.joules:7.3f} J")
