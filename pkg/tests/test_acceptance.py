"""Exit criteria for the package, each at its pinned tolerance.

Run ``pytest tests/test_acceptance.py`` to see one PASS/FAIL line per
criterion in the terminal summary.
"""

import json
import random
import subprocess
import sys

import pytest
from _acceptance import criterion
from oracles import brute_force_emissions_g, exhaustive_front, fine_step_energy
from test_ingest import fuzz_corpus, run_fuzz

from edgecarbon import (
    Energy,
    EnergyMixSnapshot,
    FacilityProfile,
    GridProfile,
    PowerModel,
    PowerTrace,
    Scenario,
    SourceCoefficients,
    Task,
    TimeInterval,
    WorkloadTrace,
    compare_locations,
    compare_models,
    emissions,
    estimate,
    integrate_energy,
    mix_to_ci,
    pareto_front,
    power_at,
    relative_reduction,
    sweep_start_time,
    transfer_duration,
)
from edgecarbon.carbon import tile_daily
from edgecarbon.ingest import (
    data_path,
    dump_ci_csv,
    dump_coefficients_csv,
    dump_mix_csv,
    dump_model_profiles,
    dump_power_model,
    load_ci_day,
    load_power_model,
    load_model_profiles,
    parse_ci_csv,
    parse_coefficients_csv,
    parse_mix_csv,
    parse_model_profiles,
    parse_power_model,
)
from edgecarbon.units import parse_timestamp

REL = 1e-9
H = 3600.0
DAY0 = parse_timestamp("2022-06-01T00:00:00Z")


def reference_scenario(ci_grid):
    node = PowerModel.constant("node", 400, facility_housed=True)
    task = Task("train", "training", duration_s=4.5 * H, utilization={"node": ((0.0, 1.0),)})
    return Scenario({"node": node}, FacilityProfile("edge-dc", 2.0), ci_grid, WorkloadTrace((task,)), DAY0)


@criterion(1, "400 W x 4.5 h at PUE 2.0 -> 3.6 kWh")
def test_01_energy_pipeline():
    report = estimate(reference_scenario(GridProfile.constant("CY", 621)))
    assert report.total_energy.kwh == pytest.approx(3.6, rel=REL)
    return f"{report.total_energy.kwh} kWh"


@criterion(2, "3.6 kWh at CI 621 -> 2235.6 g, at CI 13 -> 46.8 g")
def test_02_emissions():
    seg = [(TimeInterval(DAY0, DAY0 + 4.5 * H), Energy.from_kwh(3.6))]
    cy = emissions(seg, GridProfile.constant("CY", 621)).grams
    se = emissions(seg, GridProfile.constant("SE", 13)).grams
    assert cy == pytest.approx(2235.6, rel=REL)
    assert se == pytest.approx(46.8, rel=REL)
    assert estimate(reference_scenario(GridProfile.constant("SE", 13))).total_emissions.grams == pytest.approx(46.8, rel=REL)
    return f"{cy:.6g} g / {se:.6g} g"


@criterion(3, "energy mix aggregation {0.5x800, 0.5x0} -> 400, {0.8x41, 0.2x650} -> 162.8")
def test_03_mix():
    a = mix_to_ci(EnergyMixSnapshot(0, {"A": 0.5, "B": 0.5}), SourceCoefficients({"A": 800, "B": 0})).g_per_kwh
    b = mix_to_ci(EnergyMixSnapshot(0, {"solar": 0.8, "oil": 0.2}), SourceCoefficients({"solar": 41, "oil": 650})).g_per_kwh
    assert a == pytest.approx(400, rel=REL)
    assert b == pytest.approx(162.8, rel=REL)
    return f"{a:.6g}, {b:.6g}"


@criterion(4, "measured load curve: all 8 points exact, 0.625 -> 115 W")
def test_04_measured_points():
    server, rpi = load_power_model("server_r610"), load_power_model("rpi4")
    measured = {
        server: {3: 87, 6: 91, 9: 139, 12: 197},
        rpi: {1: 4.2, 2: 5.1, 3: 5.2, 4: 5.9},
    }
    checked = 0
    for model, rows in measured.items():
        total = max(rows)
        for cores, watts in rows.items():
            assert power_at(model, cores / total).watts == watts
            checked += 1
    assert checked == 8
    assert power_at(server, 0.625).watts == pytest.approx(115, rel=REL)
    return "8/8 exact"


@criterion(5, "classifier profiles: energies {373, 51, 39} Wh, ResNet50->MobileNetV2 reduction in [89, 90] %")
def test_05_model_profiles():
    rows = compare_models(load_model_profiles(), 5000, GridProfile.constant("CY", 621), DAY0)
    energies = {r.name: r.energy.wh for r in rows}
    assert energies["ResNet50"] == pytest.approx(373, rel=REL)
    assert energies["SqueezeNet"] == pytest.approx(51, rel=REL)
    assert energies["MobileNetV2"] == pytest.approx(39, rel=REL)
    cut = relative_reduction(energies["ResNet50"], energies["MobileNetV2"])
    assert 89 <= cut <= 90
    return f"reduction {cut:.2f} %"


@criterion(6, "Pareto on accuracy/latency/energy -> {ResNet50, MobileNetV2}")
def test_06_pareto():
    rows = [
        {"name": p.name, "accuracy": p.accuracy_pct, "latency": p.mean_inference_ms, "energy": p.energy_wh_per_5k}
        for p in load_model_profiles()
    ]
    objectives = [("accuracy", "max"), ("latency", "min"), ("energy", "min")]
    front = [r["name"] for r in pareto_front(rows, objectives)]
    oracle = [rows[i]["name"] for i in exhaustive_front(rows, objectives)]
    assert front == oracle == ["ResNet50", "MobileNetV2"]
    return "SqueezeNet dominated"


@criterion(7, "transfer: 144 GB over 100 Mbps -> 11520 s raw, 3.5 h +/- 5 % at default efficiency")
def test_07_transfer():
    raw = transfer_duration(144_000_000_000, 100e6, 1.0)
    assert raw == pytest.approx(11_520, rel=REL)
    default = transfer_duration(144_000_000_000, 100e6)
    assert abs(default / 3600 - 3.5) <= 0.05 * 3.5
    return f"{default / 3600:.3f} h"


@criterion(8, "integration matches 1 s fine-step oracle within 0.1 % on 100 random traces")
def test_08_integration_oracle():
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(100):
        n = rng.randint(2, 20)
        t = rng.uniform(0, 1e5)
        samples = []
        for _ in range(n):
            samples.append((t, rng.uniform(0, 500)))
            t += rng.uniform(1, 300)
        trace = PowerTrace(tuple(samples))
        got = integrate_energy(trace, trace.span).joules
        want = fine_step_energy(samples, samples[0][0], samples[-1][0], step=1.0)
        err = abs(got - want) / want
        worst = max(worst, err)
        assert err <= 1e-3
    return f"worst rel err {worst:.2e}"


@criterion(9, "start-time sweep: best in the midday dip, matches brute force, energy invariant, noon < 18:00 < 21:00")
def test_09_sweep():
    grid = GridProfile("CY", ci_series=tile_daily(load_ci_day("CY"), 2))
    s = reference_scenario(grid)
    result = sweep_start_time(s, TimeInterval(DAY0, DAY0 + 24 * H), H)
    energies = [c.report.total_energy.joules for c in result]
    assert max(energies) == pytest.approx(min(energies), rel=REL)
    got = [c.report.total_emissions.grams for c in result]
    want = [brute_force_emissions_g(400, DAY0 + k * H, 4.5 * H, 2.0, grid.series.points) for k in range(24)]
    assert sorted(range(24), key=got.__getitem__) == sorted(range(24), key=want.__getitem__)
    assert result.best_index == min(range(24), key=want.__getitem__)
    best = result.best.value
    # daylight (solar share > 0) on the fixture is 02:30-17:00 UTC
    assert DAY0 + 2.5 * H <= best and best + 4.5 * H <= DAY0 + 17 * H
    # local time in Cyprus is UTC+3
    noon, six_pm, nine_pm = (got[h - 3] for h in (12, 18, 21))
    assert noon < six_pm < nine_pm
    return f"best {result.best.label}; noon {noon:.0f} g < 18:00 {six_pm:.0f} g < 21:00 {nine_pm:.0f} g"


@criterion(10, "locations {621, 311, 13}: SE < DE < CY; reduction(260 -> 13) = 95 %")
def test_10_locations():
    grids = [GridProfile.constant(r, ci) for r, ci in (("CY", 621), ("DE", 311), ("SE", 13))]
    result = compare_locations(reference_scenario(grids[0]), grids)
    ranked = [c.label for c in sorted(result, key=lambda c: c.report.total_emissions.grams)]
    assert ranked == ["SE", "DE", "CY"]
    pair = compare_locations(
        reference_scenario(GridProfile.constant("A", 260)), [GridProfile.constant("A", 260), GridProfile.constant("B", 13)]
    )
    a, b = (c.report.total_emissions for c in pair)
    cut = relative_reduction(a, b)
    assert cut == pytest.approx(95.0, rel=REL)
    return f"{' < '.join(ranked)}; {cut:.6g} %"


@criterion(11, "parser fuzz (>= 1000 inputs) raises structured errors only; fixtures round-trip")
def test_11_robustness():
    corpus = fuzz_corpus(1000)
    structured, ok, crashes = run_fuzz(corpus)
    assert len(corpus) >= 1000
    assert crashes == [], crashes[:3]

    for name in ("ci_cy_synthetic_day.csv", "ci_se_synthetic_day.csv"):
        series, _ = parse_ci_csv(data_path(name).read_bytes())
        assert parse_ci_csv(dump_ci_csv(series))[0] == series
    snaps, _ = parse_mix_csv(data_path("mix_cy_synthetic_day.csv").read_bytes())
    assert parse_mix_csv(dump_mix_csv(snaps))[0] == snaps
    coeffs = parse_coefficients_csv(data_path("source_coefficients.csv").read_bytes())
    assert parse_coefficients_csv(dump_coefficients_csv(coeffs)) == coeffs
    profiles = parse_model_profiles(data_path("model_profiles.csv").read_bytes())
    assert parse_model_profiles(dump_model_profiles(profiles)) == profiles
    for path in data_path("power_models").glob("*.json"):
        model = parse_power_model(path.read_bytes())
        assert parse_power_model(dump_power_model(model)) == model
    return f"{len(corpus)} inputs x 7 parsers: {structured} structured errors, {ok} parsed, 0 crashes"


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "edgecarbon", *argv], capture_output=True, check=False)
    return proc.returncode, proc.stdout, proc.stderr


@criterion(12, "CLI json for criteria 1, 5, 6 byte-identical across runs; exit codes 0/2/3")
def test_12_cli():
    reference = str(data_path("scenarios/reference.json"))
    profiles = str(data_path("model_profiles.csv"))
    commands = [
        ("estimate", reference, "--format", "json"),
        ("compare-models", profiles, "--grid", "CY=621", "--format", "json"),
        ("compare-models", profiles, "--grid", "CY=621", "--pareto", "--format", "json"),
    ]
    for argv in commands:
        first, second = _cli(*argv), _cli(*argv)
        assert first[0] == 0
        assert first[1] == second[1]
    doc = json.loads(_cli(*commands[0])[1])
    assert (doc["total_energy_kwh"], doc["total_emissions_g"]) == (3.6, 2235.6)
    assert _cli("estimate", "does-not-exist.json")[0] == 2
    assert _cli("sweep-time", str(data_path("scenarios/reference_cy_day.json")), "--window", "24h")[0] == 3
    return "3 commands stable; exit 2 and 3 observed"
