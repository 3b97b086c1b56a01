import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from hpcwater import (
    LITERS_PER_US_GALLON,
    EnergyMixSample,
    EnergyMixSeries,
    PowerTrace,
    SourceFactors,
    WeatherSample,
    WeatherSeries,
    WueCurve,
    build_intensity_series,
    carbon_intensity_of_mix,
    ewf_of_mix,
    operational_footprint,
    water_intensity,
    wet_bulb_temperature,
    wue_at,
)
from hpcwater.errors import (
    AlignmentError,
    ConfigurationError,
    DomainError,
    ParameterResolutionError,
    RangeViolation,
    ValidationError,
)
from hpcwater.operational import DEFAULT_WUE_CURVE, IntensitySeries
from hpcwater.timeseries import TimeSeries

from .conftest import HOUR, T0
from .oracles import minute_water, stull_wet_bulb

# -- wet bulb ---------------------------------------------------------------------


def test_wet_bulb_reference_point():
    # frozen from the scalar oracle: stull_wet_bulb(20, 50)
    assert stull_wet_bulb(20.0, 50.0) == pytest.approx(13.699341968988136, abs=1e-12)
    assert wet_bulb_temperature(20.0, 50.0) == pytest.approx(13.699341968988136, abs=1e-12)
    assert wet_bulb_temperature(20.0, 50.0) == pytest.approx(13.7, abs=0.01)


def test_wet_bulb_near_saturation():
    assert abs(wet_bulb_temperature(30.0, 99.0) - 30.0) <= 0.5


@pytest.mark.parametrize("t,rh", [(20.0, 2.0), (20.0, 99.5), (55.0, 50.0), (-25.0, 50.0), (20.0, math.nan)])
def test_wet_bulb_domain(t, rh):
    with pytest.raises(DomainError):
        wet_bulb_temperature(t, rh)


def test_wet_bulb_clamp_is_explicit():
    assert wet_bulb_temperature(20.0, 2.0, clamp=True) == wet_bulb_temperature(20.0, 5.0)


def test_wet_bulb_vectorized_matches_scalar():
    t = np.array([0.0, 12.5, 33.0])
    rh = np.array([10.0, 60.0, 95.0])
    out = wet_bulb_temperature(t, rh)
    assert out == pytest.approx([stull_wet_bulb(a, b) for a, b in zip(t, rh)], abs=1e-12)


def test_weather_sample_ranges():
    with pytest.raises(ValidationError):
        WeatherSample(T0, 20.0, 101.0)
    with pytest.raises(ValidationError):
        WeatherSample(T0, 70.0, 50.0)


# -- WUE curve --------------------------------------------------------------------

CURVE = WueCurve(((10.0, 1.0), (20.0, 3.0)))


def weather_for_wet_bulb(target, air_temp=30.0):
    rh = brentq(lambda r: wet_bulb_temperature(air_temp, r) - target, 5.0, 99.0, xtol=1e-14)
    return WeatherSample(T0, air_temp, rh)


@given(st.floats(-20, 50), st.floats(5, 99))
def test_constant_curve(t, rh):
    assert wue_at(WueCurve.constant(1.2), WeatherSample(T0, t, rh)) == 1.2


def test_curve_interpolation():
    assert CURVE(15.0) == 2.0
    assert wue_at(CURVE, weather_for_wet_bulb(15.0)) == pytest.approx(2.0, abs=1e-9)


def test_curve_endpoint_clamp():
    assert CURVE(25.0) == 3.0
    assert wue_at(CURVE, weather_for_wet_bulb(25.0)) == 3.0
    assert CURVE(-5.0) == 1.0


def test_empty_curve():
    with pytest.raises(ConfigurationError):
        wue_at(WueCurve(()), WeatherSample(T0, 20.0, 50.0))


@pytest.mark.parametrize(
    "knots,err",
    [
        (((0.0, 0.01),), RangeViolation),
        (((10.0, 1.0), (10.0, 2.0)), ValidationError),
        (((10.0, 2.0), (20.0, 1.0)), ValidationError),
    ],
)
def test_curve_validation(knots, err):
    with pytest.raises(err):
        WueCurve(knots)


@given(st.floats(-40, 60), st.floats(-40, 60))
def test_default_curve_is_monotone(a, b):
    lo, hi = sorted((a, b))
    assert DEFAULT_WUE_CURVE(lo) <= DEFAULT_WUE_CURVE(hi)


# -- mixes ---------------------------------------------------------------------------


def test_single_source_mix(factors):
    assert ewf_of_mix({"a": 1.0}, factors) == 4.0


def test_half_and_half_extremes():
    f = {"lo": SourceFactors("lo", 1.0, 0.0), "hi": SourceFactors("hi", 17.0, 0.0)}
    assert ewf_of_mix(EnergyMixSample(T0, {"lo": 0.5, "hi": 0.5}), f) == 9.0


@pytest.mark.parametrize("shares", [{"a": 0.5, "b": 0.4}, {}, {"a": 1.2, "b": -0.2}])
def test_bad_shares(factors, shares):
    with pytest.raises(ValidationError):
        ewf_of_mix(shares, factors)


def test_unknown_source(factors):
    with pytest.raises(ParameterResolutionError, match="unobtainium"):
        ewf_of_mix({"unobtainium": 1.0}, factors)


def test_carbon_of_mix(factors):
    assert carbon_intensity_of_mix({"coal": 1.0}, factors) == 820.0
    assert carbon_intensity_of_mix({"coal": 0.5, "nuclear": 0.5}, factors) == 416.0
    with pytest.raises(ValidationError):
        carbon_intensity_of_mix({}, factors)


@given(st.floats(0, 1))
def test_mix_is_convex(x):
    f = {"p": SourceFactors("p", 1.0, 820.0), "q": SourceFactors("q", 17.0, 24.0)}
    shares = {"p": x, "q": 1 - x}
    assert 1.0 - 1e-12 <= ewf_of_mix(shares, f) <= 17.0 + 1e-12
    assert 24.0 - 1e-9 <= carbon_intensity_of_mix(shares, f) <= 820.0 + 1e-9


@pytest.mark.parametrize(
    "ewf,cooling,ok",
    [(2.2, "wet_tower", True), (3.2, "wet_tower", True), (2.19, "wet_tower", False), (3.21, "wet_tower", False),
     (0.5, "once_through", True), (1.5, "once_through", True), (0.49, "once_through", False), (1.51, "once_through", False)],
)
def test_nuclear_cooling_ranges(ewf, cooling, ok):
    if ok:
        SourceFactors("nuclear", ewf, 12.0, cooling=cooling)
    else:
        with pytest.raises(RangeViolation):
            SourceFactors("nuclear", ewf, 12.0, cooling=cooling)


def test_source_factor_validation():
    with pytest.raises(RangeViolation):
        SourceFactors("x", 25.0, 1.0)
    with pytest.raises(ValidationError):
        SourceFactors("nuclear", 2.5, 1.0, cooling="dry")


# -- water intensity -------------------------------------------------------------------


def test_water_intensity_examples():
    assert water_intensity(1.0, 1.25, 2.0).wi == 3.5
    assert water_intensity(0.7, 1.4, 0.0).wi == 0.7
    assert water_intensity(0.0, 1.05, 2.0).wi == 2.1


def test_pue_below_one():
    with pytest.raises(ValidationError):
        water_intensity(1.0, 0.99, 2.0)


@given(st.floats(0, 10), st.floats(1, 3), st.floats(0, 20))
def test_split_sums_exactly(wue, pue, ewf):
    out = water_intensity(wue, pue, ewf)
    assert out.wi == out.wi_direct + out.wi_indirect
    assert out.wi_indirect == pue * ewf


# -- intensity series ---------------------------------------------------------------------


def test_constant_inputs_give_constant_series(factors):
    w = WeatherSeries.constant(T0, 24, HOUR, 20.0, 50.0)
    m = EnergyMixSeries.constant(T0, 24, HOUR, {"gas": 0.5, "nuclear": 0.5})
    s = build_intensity_series(w, m, 1.25, DEFAULT_WUE_CURVE, factors)
    assert len(s) == 24
    for col in (s.wue, s.ewf, s.wi, s.ci):
        assert np.all(col == col[0])
    assert s.ewf[0] == pytest.approx(0.5 * 1.2 + 0.5 * 2.7)


def test_mix_step_change(factors):
    times = T0 + HOUR * np.arange(6)
    shares = np.array([[1.0, 0.0]] * 3 + [[0.0, 1.0]] * 3)
    m = EnergyMixSeries(times, ("a", "b"), shares, HOUR)
    w = WeatherSeries.constant(T0, 6, HOUR, 15.0, 40.0)
    s = build_intensity_series(w, m, 1.0, DEFAULT_WUE_CURVE, factors)
    assert list(s.ewf) == [4.0, 4.0, 4.0, 2.0, 2.0, 2.0]


def test_diurnal_sinusoid_keeps_period(factors):
    n = 24 * 7
    hours = np.arange(n)
    temp = 18.0 + 8.0 * np.sin(2 * np.pi * hours / 24)
    w = WeatherSeries(T0 + HOUR * hours, temp, np.full(n, 60.0), HOUR)
    m = EnergyMixSeries.constant(T0, n, HOUR, {"gas": 1.0})
    s = build_intensity_series(w, m, 1.2, DEFAULT_WUE_CURVE, factors)
    brute = np.array([DEFAULT_WUE_CURVE(stull_wet_bulb(t, 60.0)) for t in temp])
    assert s.wue == pytest.approx(brute, abs=1e-12)
    assert np.allclose(s.wue[24:], s.wue[:-24], atol=1e-12)
    assert not np.allclose(s.wue[12:], s.wue[:-12])


def test_finest_step_and_forward_fill(factors):
    w = WeatherSeries.constant(T0, 4, HOUR, 20.0, 50.0)
    m = EnergyMixSeries(T0 + np.timedelta64(900, "s") * np.arange(16), ("a", "b"),
                        np.array([[1.0, 0.0], [0.0, 1.0]] * 8), np.timedelta64(900, "s"))
    s = build_intensity_series(w, m, 1.0, DEFAULT_WUE_CURVE, factors)
    assert s.step == np.timedelta64(900, "s")
    assert len(s) == 16
    assert s.wue[0] == s.wue[-1]


def test_pue_series(factors):
    w = WeatherSeries.constant(T0, 4, HOUR, 20.0, 50.0)
    m = EnergyMixSeries.constant(T0, 4, HOUR, {"a": 1.0})
    pue = TimeSeries(T0 + HOUR * np.arange(4), [1.1, 1.2, 1.3, 1.4], HOUR)
    s = build_intensity_series(w, m, pue, DEFAULT_WUE_CURVE, factors)
    assert s.wi_indirect == pytest.approx([4.4, 4.8, 5.2, 5.6])


def test_no_overlap(factors):
    w = WeatherSeries.constant(T0, 4, HOUR, 20.0, 50.0)
    m = EnergyMixSeries.constant(T0 + 10 * HOUR, 4, HOUR, {"a": 1.0})
    with pytest.raises(AlignmentError):
        build_intensity_series(w, m, 1.2, DEFAULT_WUE_CURVE, factors)


def test_long_gap_is_rejected(factors):
    times = np.concatenate([T0 + HOUR * np.arange(3), T0 + HOUR * np.arange(12, 15)])
    w = WeatherSeries(times, np.full(6, 20.0), np.full(6, 50.0), HOUR)
    m = EnergyMixSeries.constant(T0, 15, HOUR, {"a": 1.0})
    with pytest.raises(AlignmentError):
        build_intensity_series(w, m, 1.2, DEFAULT_WUE_CURVE, factors)


def test_short_gap_is_filled(factors):
    times = np.concatenate([T0 + HOUR * np.arange(3), T0 + HOUR * np.arange(8, 10)])
    w = WeatherSeries(times, [20.0, 20.0, 25.0, 10.0, 10.0], np.full(5, 50.0), HOUR)
    m = EnergyMixSeries.constant(T0, 10, HOUR, {"a": 1.0})
    s = build_intensity_series(w, m, 1.2, DEFAULT_WUE_CURVE, factors)
    assert np.all(s.wue[2:8] == s.wue[2])


# -- integration --------------------------------------------------------------------------------


def flat_intensity(n, wue, pue, ewf, step=HOUR, start=T0):
    return IntensitySeries(start + step * np.arange(n), step, wue, ewf, pue, 100.0)


def test_one_hour_at_one_megawatt():
    out = operational_footprint(PowerTrace.constant(T0, 1, HOUR, 1000.0), flat_intensity(1, 1.0, 1.5, 2.0))
    assert out.total.liters == 4000.0
    assert out.direct.liters == 1000.0


def test_zero_power():
    out = operational_footprint(PowerTrace.constant(T0, 5, HOUR, 0.0), flat_intensity(5, 1.0, 1.5, 2.0))
    assert out.total.liters == 0.0
    assert out.direct_share == 0.0


def test_year_of_sixty_gallons_per_minute():
    wue = 60.0 * 60.0 * LITERS_PER_US_GALLON / 157.725
    n = 365 * 24
    out = operational_footprint(PowerTrace.constant(T0, n, HOUR, 157.725), flat_intensity(n, wue, 1.0, 0.0))
    assert out.direct.gallons == pytest.approx(31_536_000.0, rel=1e-9)
    assert abs(out.direct.gallons - 30e6) / 30e6 < 0.10


def test_step_mismatch():
    with pytest.raises(AlignmentError):
        operational_footprint(PowerTrace.constant(T0, 4, np.timedelta64(900, "s"), 1.0), flat_intensity(4, 1.0, 1.0, 1.0))


def test_offset_grids():
    with pytest.raises(AlignmentError):
        operational_footprint(
            PowerTrace.constant(T0 + np.timedelta64(1800, "s"), 4, HOUR, 1.0), flat_intensity(6, 1.0, 1.0, 1.0)
        )


def test_negative_power_rejected():
    with pytest.raises(ValidationError):
        PowerTrace(T0 + HOUR * np.arange(2), [1.0, -1.0], HOUR)


def test_series_frame_columns():
    out = operational_footprint(PowerTrace.constant(T0, 3, HOUR, 10.0), flat_intensity(3, 1.0, 1.5, 2.0))
    assert list(out.series.columns) == ["energy_kwh", "direct_l", "indirect_l", "total_l", "wi", "ci", "carbon_g"]
    assert out.series["carbon_g"].sum() == pytest.approx(3 * 10.0 * 1.5 * 100.0)



@settings(max_examples=60)
@given(st.data())
def test_matches_minute_oracle(data):
    n = data.draw(st.integers(1, 48))
    p = data.draw(st.lists(st.floats(0, 5000), min_size=n, max_size=n))
    wue = data.draw(st.lists(st.floats(0.05, 3), min_size=n, max_size=n))
    pue = data.draw(st.lists(st.floats(1, 2), min_size=n, max_size=n))
    ewf = data.draw(st.lists(st.floats(0, 17), min_size=n, max_size=n))
    out = operational_footprint(
        PowerTrace(T0 + HOUR * np.arange(n), p, HOUR),
        IntensitySeries(T0 + HOUR * np.arange(n), HOUR, wue, ewf, pue, 0.0),
    )
    d, i = minute_water(p, wue, pue, ewf, 60)
    assert out.direct.liters == pytest.approx(d, rel=1e-9, abs=1e-9)
    assert out.indirect.liters == pytest.approx(i, rel=1e-9, abs=1e-9)


@settings(max_examples=60)
@given(st.integers(1, 24), st.integers(1, 24), st.floats(0, 1000), st.floats(0.05, 3), st.floats(0, 17))
def test_additive_over_time(n1, n2, kw, wue, ewf):
    whole = operational_footprint(PowerTrace.constant(T0, n1 + n2, HOUR, kw), flat_intensity(n1 + n2, wue, 1.2, ewf))
    first = operational_footprint(PowerTrace.constant(T0, n1, HOUR, kw), flat_intensity(n1, wue, 1.2, ewf))
    second = operational_footprint(
        PowerTrace.constant(T0 + n1 * HOUR, n2, HOUR, kw), flat_intensity(n2, wue, 1.2, ewf, start=T0 + n1 * HOUR)
    )
    assert whole.total.liters == pytest.approx(first.total.liters + second.total.liters, rel=1e-12, abs=1e-9)


@settings(max_examples=40)
@given(st.floats(0.1, 1000), st.floats(0.1, 10))
def test_linear_in_power(kw, k):
    inten = flat_intensity(6, 0.8, 1.3, 2.0)
    a = operational_footprint(PowerTrace.constant(T0, 6, HOUR, kw), inten)
    b = operational_footprint(PowerTrace.constant(T0, 6, HOUR, kw * k), inten)
    assert b.total.liters == pytest.approx(k * a.total.liters, rel=1e-12)
