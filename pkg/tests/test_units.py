import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgecarbon import (
    CarbonIntensity,
    CarbonMass,
    Energy,
    Power,
    TimeInterval,
    ValidationError,
    energy_from_power,
    format_timestamp,
    parse_timestamp,
    wh_to_joules,
)


@pytest.mark.parametrize("wh, joules", [(1, 3600), (0, 0), (373, 1_342_800)])
def test_wh_to_joules(wh, joules):
    assert wh_to_joules(wh).joules == joules


def test_wh_to_joules_rejects_negative():
    with pytest.raises(ValidationError):
        wh_to_joules(-1)


@pytest.mark.parametrize(
    "watts, seconds, joules",
    [(100, 3600, 360_000), (0, 1234.5, 0), (400, 16_200, 6_480_000)],
)
def test_energy_from_power(watts, seconds, joules):
    e = energy_from_power(Power(watts), seconds)
    assert e.joules == joules


def test_energy_from_power_reference_node_is_1_8_kwh():
    assert energy_from_power(Power(400), 16_200).kwh == pytest.approx(1.8, rel=1e-12)


def test_negative_duration_rejected():
    with pytest.raises(ValidationError):
        energy_from_power(Power(10), -1)


@pytest.mark.parametrize("cls", [Energy, Power, CarbonMass, CarbonIntensity])
@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf, -math.inf, "x", None])
def test_constructors_reject_bad_values(cls, bad):
    with pytest.raises(ValidationError):
        cls(bad)


@given(st.floats(min_value=0, max_value=1e12, allow_nan=False))
def test_wh_joule_round_trip(wh):
    back = Energy.from_wh(wh).wh
    assert back == pytest.approx(wh, rel=1e-9, abs=0)


@given(
    st.floats(min_value=0, max_value=1e6, allow_nan=False),
    st.floats(min_value=0, max_value=1e6, allow_nan=False),
)
def test_energy_from_power_is_bilinear(p, t):
    base = energy_from_power(Power(p), t).joules
    assert energy_from_power(Power(2 * p), t).joules == pytest.approx(2 * base, rel=1e-12, abs=0)
    assert energy_from_power(Power(p), 2 * t).joules == pytest.approx(2 * base, rel=1e-12, abs=0)


def test_interval_must_be_nonempty():
    with pytest.raises(ValidationError):
        TimeInterval(5, 5)
    iv = TimeInterval(0, 10)
    assert iv.duration == 10 and iv.contains(0) and not iv.contains(10)


def test_timestamp_round_trip():
    t = parse_timestamp("2022-06-01T12:00:00Z")
    assert format_timestamp(t) == "2022-06-01T12:00:00Z"
    assert parse_timestamp("2022-06-01T15:00:00+03:00") == t


def test_naive_timestamp_rejected():
    with pytest.raises(ValidationError):
        parse_timestamp("2022-06-01T12:00:00")
