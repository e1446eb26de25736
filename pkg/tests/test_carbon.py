import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import step_ci

from edgecarbon import (
    CarbonIntensitySeries,
    ConfigurationError,
    CoverageError,
    Energy,
    EnergyMixSnapshot,
    GridProfile,
    SourceCoefficients,
    TimeInterval,
    ValidationError,
    build_ci_series,
    ci_at,
    emissions,
    itemize_emissions,
    mix_to_ci,
)
from edgecarbon.carbon import tile_daily
from edgecarbon.ingest import load_coefficients, load_mix_day

H = 3600.0


@pytest.mark.parametrize(
    "shares, coeffs, expected",
    [
        ({"A": 0.5, "B": 0.5}, {"A": 800, "B": 0}, 400.0),
        ({"A": 1.0}, {"A": 621}, 621.0),
        ({"solar": 0.8, "oil": 0.2}, {"solar": 41, "oil": 650}, 162.8),
    ],
)
def test_mix_to_ci(shares, coeffs, expected):
    ci = mix_to_ci(EnergyMixSnapshot(0, shares), SourceCoefficients(coeffs))
    assert ci.g_per_kwh == pytest.approx(expected, rel=1e-9)


def test_missing_coefficient_is_configuration_error():
    with pytest.raises(ConfigurationError):
        mix_to_ci(EnergyMixSnapshot(0, {"coal": 1.0}), SourceCoefficients({"solar": 41}))


@pytest.mark.parametrize("shares", [{"A": 0.5, "B": 0.4}, {"A": 1.2}, {"A": -0.1, "B": 1.1}, {}])
def test_bad_snapshots(shares):
    with pytest.raises(ValidationError):
        EnergyMixSnapshot(0, shares)


@st.composite
def mixes(draw):
    n = draw(st.integers(1, 6))
    raw = [draw(st.floats(0.01, 1.0)) for _ in range(n)]
    total = sum(raw)
    shares = {f"s{i}": r / total for i, r in enumerate(raw)}
    shares["s0"] = 1.0 - math.fsum(v for k, v in shares.items() if k != "s0")
    coeffs = {k: draw(st.floats(0, 1000, allow_nan=False)) for k in shares}
    return shares, coeffs


@given(mixes())
def test_mix_ci_within_coefficient_range(mix):
    shares, coeffs = mix
    ci = mix_to_ci(EnergyMixSnapshot(0, shares), SourceCoefficients(coeffs)).g_per_kwh
    used = [coeffs[k] for k, v in shares.items() if v > 0]
    assert min(used) - 1e-9 <= ci <= max(used) + 1e-9


def test_ci_at_step_hold():
    series = CarbonIntensitySeries("X", ((0, 600), (12 * H, 300)))
    assert ci_at(series, 13 * H).g_per_kwh == 300
    assert ci_at(series, 12 * H - 1).g_per_kwh == 600


def test_ci_at_first_point():
    series = CarbonIntensitySeries("X", ((0, 600),))
    assert ci_at(series, 0).g_per_kwh == 600


def test_constant_sweden():
    se = CarbonIntensitySeries.constant("SE", 13)
    for t in (0, 1e6, 1.6e9):
        assert ci_at(se, t).g_per_kwh == 13


def test_ci_at_before_first_point():
    series = CarbonIntensitySeries("X", ((100, 1),))
    with pytest.raises(CoverageError):
        ci_at(series, 99)


def test_ci_at_after_hold_window():
    series = CarbonIntensitySeries("X", ((0, 1), (900, 2)))
    assert series.end == 1800
    with pytest.raises(CoverageError):
        ci_at(series, 1800)


def test_emissions_reference_cyprus():
    grid = GridProfile.constant("CY", 621)
    seg = [(TimeInterval(0, 16200), Energy.from_kwh(3.6))]
    assert emissions(seg, grid).grams == pytest.approx(2235.6, rel=1e-9)


def test_emissions_clean_grid():
    grid = GridProfile.constant("clean", 0)
    assert emissions([(TimeInterval(0, 10), Energy(1e9))], grid).grams == 0


def test_emissions_two_segments():
    series = CarbonIntensitySeries("X", ((0, 100), (H, 300)), hold_s=H)
    segs = [(TimeInterval(0, H), Energy.from_kwh(1)), (TimeInterval(H, 2 * H), Energy.from_kwh(1))]
    assert emissions(segs, series).grams == pytest.approx(400, rel=1e-12)


def test_segment_crossing_breakpoint_is_split():
    series = CarbonIntensitySeries("X", ((0, 100), (H, 300)), hold_s=H)
    items = itemize_emissions([(TimeInterval(0.5 * H, 1.5 * H), Energy.from_kwh(2))], series)
    assert [i.intensity.g_per_kwh for i in items] == [100, 300]
    assert sum(i.emissions.grams for i in items) == pytest.approx(400)


def test_emissions_coverage_error():
    series = CarbonIntensitySeries("X", ((0, 100), (H, 300)), hold_s=H)
    with pytest.raises(CoverageError):
        emissions([(TimeInterval(H, 3 * H), Energy(1))], series)


def test_overlapping_segments_rejected():
    grid = GridProfile.constant("X", 1)
    with pytest.raises(ValidationError):
        emissions([(TimeInterval(0, 10), Energy(1)), (TimeInterval(5, 15), Energy(1))], grid)


@st.composite
def segment_lists(draw):
    n = draw(st.integers(1, 8))
    t = draw(st.floats(0, 20 * H))
    segs = []
    for _ in range(n):
        d = draw(st.floats(1, 4 * H))
        segs.append((TimeInterval(t, t + d), Energy(draw(st.floats(0, 1e8)))))
        t += d + draw(st.floats(0, H))
    return segs


CY_LIKE = CarbonIntensitySeries("X", tuple((k * 900.0, 100 + 500 * abs(math.sin(k / 9))) for k in range(300)))


@given(segment_lists(), st.floats(0, 100))
def test_emissions_linear_in_energy(segs, k):
    base = emissions(segs, CY_LIKE).grams
    scaled = emissions([(iv, Energy(e.joules * k)) for iv, e in segs], CY_LIKE).grams
    assert scaled == pytest.approx(base * k, rel=1e-9, abs=1e-9)


@given(segment_lists(), st.floats(0, 2000, allow_nan=False))
def test_constant_grid_reduces_to_product(segs, ci):
    grid = GridProfile.constant("C", ci)
    total_kwh = math.fsum(e.kwh for _, e in segs)
    assert emissions(segs, grid).grams == pytest.approx(total_kwh * ci, rel=1e-9, abs=1e-9)


@given(segment_lists(), st.floats(0.01, 0.99), st.floats(0, 2000, allow_nan=False))
def test_splitting_segment_under_constant_ci(segs, frac, ci):
    grid = GridProfile.constant("C", ci)
    iv, e = segs[0]
    cut = iv.start + frac * iv.duration
    if not iv.start < cut < iv.end:
        return
    share = (cut - iv.start) / iv.duration
    split = [(TimeInterval(iv.start, cut), Energy(e.joules * share)), (TimeInterval(cut, iv.end), Energy(e.joules * (1 - share)))]
    assert emissions(split + segs[1:], grid).grams == pytest.approx(emissions(segs, grid).grams, rel=1e-9, abs=1e-9)


@given(segment_lists())
def test_varying_ci_matches_minute_oracle_on_aligned_grid(segs):
    # energy spread evenly in time, so a per-piece pro-rata charge is exact
    got = emissions(segs, CY_LIKE).grams
    want = 0.0
    for iv, e in segs:
        edges = sorted({iv.start, iv.end, *[t for t, _ in CY_LIKE.points if iv.start < t < iv.end]})
        for a, b in zip(edges, edges[1:]):
            want += e.kwh * (b - a) / iv.duration * step_ci(CY_LIKE.points, (a + b) / 2)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


def test_build_ci_series_single():
    s = build_ci_series([EnergyMixSnapshot(5, {"A": 1.0})], SourceCoefficients({"A": 13}))
    assert s.points == ((5.0, 13.0),)


def test_build_ci_series_empty():
    with pytest.raises(ValidationError):
        build_ci_series([], SourceCoefficients({"A": 13}))


def test_build_ci_series_solar_dip():
    mix = load_mix_day("CY")
    coeffs = load_coefficients()
    series = build_ci_series(mix, coeffs, "CY")
    assert [t for t, _ in series.points] == [m.timestamp for m in mix]
    # pointwise oracle: hand-weighted sum
    for snap, (_, ci) in zip(mix, series.points):
        want = sum(share * coeffs.values[src] for src, share in snap.shares.items())
        assert ci == pytest.approx(want, rel=1e-12)
    values = [v for _, v in series.points]
    low = values.index(min(values))
    assert 32 <= low <= 48  # 08:00-12:00 UTC
    assert values[low] < 0.3 * values[0]


def test_ci_fixture_matches_mix_fixture(cy_day):
    built = build_ci_series(load_mix_day("CY"), load_coefficients(), "CY")
    assert len(built.points) == len(cy_day.points) == 96
    for (t0, a), (t1, b) in zip(built.points, cy_day.points):
        assert t0 == t1 and a == pytest.approx(b, abs=0.005 + 1e-9)


def test_grid_needs_exactly_one_source():
    series = CarbonIntensitySeries.constant("X", 1)
    with pytest.raises(ConfigurationError):
        GridProfile("X")
    with pytest.raises(ConfigurationError):
        GridProfile("X", ci_series=series, coefficients=SourceCoefficients({"A": 1}))
    with pytest.raises(ConfigurationError):
        GridProfile("X", mix=(EnergyMixSnapshot(0, {"A": 1}),))


def test_grid_from_mix():
    grid = GridProfile("X", mix=(EnergyMixSnapshot(0, {"A": 1}),), coefficients=SourceCoefficients({"A": 42}))
    assert ci_at(grid.series, 1e9).g_per_kwh == 42


def test_tile_daily(cy_day):
    two = tile_daily(cy_day, 2)
    assert len(two.points) == 192
    assert ci_at(two, cy_day.start + 86400 + 3600).g_per_kwh == ci_at(cy_day, cy_day.start + 3600).g_per_kwh
