import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpcwater.errors import DataIOError, ParameterResolutionError, ParseError, RangeViolation, ValidationError
from hpcwater.ingestion import (
    JobRecord,
    NodePowerModel,
    load_candidates,
    load_inventory,
    load_job_log,
    load_parameter_db,
    load_series,
    load_wsi_table,
    serialize_series,
    utilization_to_power,
)
from hpcwater.operational import EnergyMixSeries, PowerTrace, WeatherSeries

from .conftest import HOUR, T0
from .oracles import minute_occupancy_energy

MINUTE = np.timedelta64(60, "s")


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- parameter database ---------------------------------------------------------------


def test_default_db_nuclear_in_wet_tower_range(default_db):
    nuclear = [f for f in default_db.source_factors.values() if "nuclear" in f.source and f.cooling == "wet_tower"]
    assert nuclear
    assert all(2.2 <= f.ewf <= 3.2 for f in nuclear)


def test_default_db_sites(default_db):
    assert set(default_db.sites) >= {"marconi", "fugaku", "polaris", "frontier"}
    assert default_db.site("marconi").pue == 1.25
    assert default_db.site("frontier").pue == 1.05
    with pytest.raises(ParameterResolutionError):
        default_db.site("nowhere")


def minimal_db(**overrides):
    data = {
        "source_factors": {"gas": {"ewf": 1.2, "carbon_intensity": 490}},
        "wsi": {"here": 2.0},
        "wue_curves": {"default": [[0, 0.1], [30, 2.0]]},
        "sites": {"s": {"pue": 1.2, "wsi_direct": "here"}},
    }
    data.update(overrides)
    return data


def test_pue_below_one_rejected(tmp_path):
    p = write(tmp_path, "db.json", json.dumps(minimal_db(sites={"s": {"pue": 0.9}})))
    with pytest.raises(RangeViolation, match=r"sites\[s\]"):
        load_parameter_db(p)


def test_empty_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_parameter_db(write(tmp_path, "db.json", ""))


def test_json_syntax_error_has_line(tmp_path):
    with pytest.raises(ParseError, match="line 2"):
        load_parameter_db(write(tmp_path, "db.json", '{\n  "wsi": {,}\n}'))


def test_yaml_is_accepted(tmp_path):
    text = """
source_factors:
  nuclear: {ewf: 2.5, carbon_intensity: 12, cooling: wet_tower}
wsi: {here: 3}
wue_curves:
  default: [[0, 0.1], [30, 2.0]]
sites:
  s: {pue: 1.3, wsi_direct: here}
"""
    db = load_parameter_db(write(tmp_path, "db.yaml", text))
    assert db.source_factors["nuclear"].ewf == 2.5
    assert db.site_wsi("s") == (3.0, 3.0)


def test_nuclear_out_of_range_rejected(tmp_path):
    bad = minimal_db(source_factors={"nuclear": {"ewf": 3.3, "carbon_intensity": 12, "cooling": "wet_tower"}})
    with pytest.raises(RangeViolation, match="2.2"):
        load_parameter_db(write(tmp_path, "db.json", json.dumps(bad)))


def test_dangling_references(tmp_path):
    bad = minimal_db(sites={"s": {"pue": 1.2, "wsi_direct": "elsewhere"}})
    with pytest.raises(ParameterResolutionError):
        load_parameter_db(write(tmp_path, "db.json", json.dumps(bad)))
    bad = minimal_db(sites={"s": {"pue": 1.2, "wue_curve": "missing"}})
    with pytest.raises(ParameterResolutionError):
        load_parameter_db(write(tmp_path, "db.json", json.dumps(bad)))


def test_area_basis_rescales(tmp_path):
    entry = {"node": 7, "site": "F", "upw": 0.1, "pcw": 0.0, "wpa": 0.0}
    db = load_parameter_db(write(tmp_path, "db.json", json.dumps(minimal_db(meta={"area_basis": "L/mm2"}, process_params=[entry]))))
    assert db.process_params[(7.0, "F")].upw == pytest.approx(10.0)


def test_missing_file(tmp_path):
    with pytest.raises(DataIOError):
        load_parameter_db(tmp_path / "absent.json")


def test_inventory_file(tmp_path, default_db):
    inv = {"system_name": "mini", "devices": [{"kind": "GPU", "count": 4, "n_ic": 9, "die_area": 800, "process_node": 7, "fab_site": "TSMC"},
                                              {"kind": "SSD", "count": 2, "capacity_gb": 100}]}
    out = load_inventory(write(tmp_path, "inv.json", json.dumps(inv)), default_db)
    assert out.system_name == "mini"
    assert len(out.devices) == 2
    with pytest.raises(ValidationError, match="devices"):
        load_inventory(write(tmp_path, "bad.json", json.dumps({"devices": [{"kind": "CPU"}]})), default_db)


# -- series files ----------------------------------------------------------------------


def mix_csv(n, shares=(("gas", 0.6), ("wind", 0.4))):
    lines = ["timestamp,source,share"]
    for h in range(n):
        for source, share in shares:
            lines.append(f"2023-01-01T{h:02d}:00:00Z,{source},{share}")
    return "\n".join(lines) + "\n"


def test_hourly_mix_file(tmp_path):
    s = load_series(write(tmp_path, "mix.csv", mix_csv(24)), "energy_mix")
    assert len(s) == 24
    assert s.step == HOUR
    assert s.sources == ("gas", "wind")


def test_mix_share_sum_violation(tmp_path):
    with pytest.raises(ValidationError, match="1.02"):
        load_series(write(tmp_path, "mix.csv", mix_csv(3, (("gas", 0.62), ("wind", 0.4)))), "energy_mix")


def test_mix_unknown_source(tmp_path, default_db):
    with pytest.raises(ParameterResolutionError, match="line 2"):
        load_series(write(tmp_path, "mix.csv", mix_csv(2, (("peat", 1.0),))), "energy_mix", known_sources=default_db.source_factors)


def test_mix_duplicate_row(tmp_path):
    text = mix_csv(2) + "2023-01-01T01:00:00Z,gas,0.6\n"
    with pytest.raises(ValidationError, match="duplicate"):
        load_series(write(tmp_path, "mix.csv", text), "energy_mix")


def test_duplicated_timestamp(tmp_path):
    text = "timestamp,power_kw\n2023-01-01T00:00:00Z,1\n2023-01-01T00:00:00Z,2\n"
    with pytest.raises(ValidationError, match="duplicated"):
        load_series(write(tmp_path, "p.csv", text), "power")


def test_non_monotone_timestamps(tmp_path):
    text = "timestamp,power_kw\n2023-01-01T02:00:00Z,1\n2023-01-01T01:00:00Z,2\n2023-01-01T03:00:00Z,2\n"
    with pytest.raises(ValidationError):
        load_series(write(tmp_path, "p.csv", text), "power")


@pytest.mark.parametrize(
    "text,match",
    [
        ("time,power_kw\n", "header"),
        ("timestamp,power_kw\n2023-01-01T00:00:00Z\n", "line 2"),
        ("timestamp,power_kw\n2023-01-01T00:00:00Z,abc\n2023-01-01T01:00:00Z,1\n", "line 2"),
        ("timestamp,power_kw\nyesterday,1\n", "timestamp"),
    ],
)
def test_malformed_rows(tmp_path, text, match):
    with pytest.raises(ParseError, match=match):
        load_series(write(tmp_path, "p.csv", text), "power")


def test_declared_step(tmp_path):
    text = "# step=15min\ntimestamp,power_kw\n2023-01-01T00:00:00Z,1\n2023-01-01T01:00:00Z,2\n"
    s = load_series(write(tmp_path, "p.csv", text), "power")
    assert s.step == np.timedelta64(900, "s")


def test_weather_file(tmp_path):
    text = "timestamp,air_temp_c,rel_humidity_pct\n2023-07-01T00:00:00Z,25.0,60\n2023-07-01T01:00:00Z,24.0,65\n"
    s = load_series(write(tmp_path, "w.csv", text), "weather")
    assert list(s.air_temp) == [25.0, 24.0]


finite = st.floats(0, 1e6, allow_subnormal=False)


@settings(max_examples=60)
@given(st.integers(1, 30), st.sampled_from([60, 900, 3600]), st.data())
def test_power_round_trip(tmp_path_factory, n, step_s, data):
    values = data.draw(st.lists(finite, min_size=n, max_size=n))
    step = np.timedelta64(step_s, "s")
    start = T0 + step * data.draw(st.integers(0, 10_000))
    series = PowerTrace(start + step * np.arange(n), values, step)
    p = tmp_path_factory.mktemp("rt") / "p.csv"
    p.write_text(serialize_series(series))
    back = load_series(p, "power")
    assert np.array_equal(back.times, series.times)
    assert back.values.tobytes() == series.values.tobytes()
    assert back.step == series.step


@settings(max_examples=40)
@given(st.integers(1, 12), st.data())
def test_mix_and_weather_round_trip(tmp_path_factory, n, data):
    raw = np.array(data.draw(st.lists(st.lists(st.floats(0.01, 1), min_size=3, max_size=3), min_size=n, max_size=n)))
    shares = raw / raw.sum(axis=1, keepdims=True)
    mix = EnergyMixSeries(T0 + HOUR * np.arange(n), ("a", "b", "c"), shares, HOUR)
    temp = data.draw(st.lists(st.floats(-60, 60), min_size=n, max_size=n))
    rh = data.draw(st.lists(st.floats(0, 100), min_size=n, max_size=n))
    weather = WeatherSeries(T0 + HOUR * np.arange(n), temp, rh, HOUR)
    d = tmp_path_factory.mktemp("rt")
    (d / "m.csv").write_text(serialize_series(mix))
    (d / "w.csv").write_text(serialize_series(weather))
    m2 = load_series(d / "m.csv", "energy_mix")
    w2 = load_series(d / "w.csv", "weather")
    assert m2.shares.tobytes() == mix.shares.tobytes()
    assert w2.air_temp.tobytes() == weather.air_temp.tobytes()
    assert w2.rel_humidity.tobytes() == weather.rel_humidity.tobytes()


def test_wsi_table(tmp_path):
    t = load_wsi_table(write(tmp_path, "wsi.csv", "region,wsi\na,1.5\nb,40\n"))
    assert t["b"].wsi == 40.0
    with pytest.raises(RangeViolation):
        load_wsi_table(write(tmp_path, "bad.csv", "region,wsi\na,0.01\n"))


def test_job_log_and_candidates(tmp_path):
    jobs = load_job_log(write(tmp_path, "jobs.csv", "job_id,start,end,nodes\nj1,2023-01-01T00:00:00Z,2023-01-01T02:00:00Z,5\n"))
    assert jobs[0].nodes_used == 5
    with pytest.raises(ValidationError):
        load_job_log(write(tmp_path, "bad.csv", "job_id,start,end,nodes\nj1,2023-01-01T02:00:00Z,2023-01-01T01:00:00Z,5\n"))
    c = load_candidates(write(tmp_path, "c.csv", "start\n2023-01-01T00:00:00Z\n2023-01-01T06:00:00Z\n"))
    assert len(c) == 2


# -- utilization ----------------------------------------------------------------------


def test_no_jobs_gives_zero_trace():
    p = utilization_to_power([], 100, NodePowerModel(2.0), HOUR, start=T0, end=T0 + 4 * HOUR)
    assert list(p.values) == [0.0] * 4
    with pytest.raises(ValidationError):
        utilization_to_power([], 100, NodePowerModel(2.0), HOUR)


def test_full_machine_for_one_step():
    job = JobRecord("j", T0, T0 + HOUR, 100)
    p = utilization_to_power([job], 100, NodePowerModel(2.0), HOUR)
    assert list(p.values) == [200.0]


def test_half_step_job_is_half_weighted():
    job = JobRecord("j", T0, T0 + HOUR / 2, 100)
    p = utilization_to_power([job], 100, NodePowerModel(2.0), HOUR)
    assert list(p.values) == [100.0]
    jobs = [JobRecord("k", T0 + np.timedelta64(20, "m"), T0 + np.timedelta64(50, "m"), 10)]
    oracle = minute_occupancy_energy(jobs, 100, 2.0, 0.0, T0, T0 + HOUR)
    assert utilization_to_power(jobs, 100, NodePowerModel(2.0), HOUR).values[0] == pytest.approx(oracle, rel=1e-12)


def test_idle_fraction():
    job = JobRecord("j", T0, T0 + HOUR, 40)
    p = utilization_to_power([job], 100, NodePowerModel(2.0, idle_fraction=0.25), HOUR)
    assert p.values[0] == pytest.approx(40 * 2.0 + 60 * 0.5)


def test_too_many_nodes():
    with pytest.raises(ValidationError):
        utilization_to_power([JobRecord("j", T0, T0 + HOUR, 101)], 100, NodePowerModel(2.0), HOUR)
    jobs = [JobRecord("a", T0, T0 + HOUR, 60), JobRecord("b", T0, T0 + HOUR, 60)]
    with pytest.raises(ValidationError):
        utilization_to_power(jobs, 100, NodePowerModel(2.0), HOUR)


def test_window_snaps_outward():
    job = JobRecord("j", T0 + np.timedelta64(90, "m"), T0 + np.timedelta64(150, "m"), 1)
    p = utilization_to_power([job], 10, NodePowerModel(1.0), HOUR)
    assert p.times[0] == T0 + HOUR
    assert len(p) == 2
    assert list(p.values) == [0.5, 0.5]


@st.composite
def job_sets(draw, total_nodes=64, horizon_min=24 * 60):
    jobs = []
    n = draw(st.integers(0, 12))
    for i in range(n):
        s = draw(st.integers(0, horizon_min - 1))
        e = draw(st.integers(s + 1, min(horizon_min, s + 600)))
        nodes = draw(st.integers(1, 8))
        jobs.append(JobRecord(f"j{i}", T0 + MINUTE * s, T0 + MINUTE * e, nodes))
    return jobs


@settings(max_examples=60, deadline=None)
@given(job_sets(), st.sampled_from([15, 60]), st.floats(0, 0.5))
def test_energy_matches_minute_oracle(jobs, step_min, idle):
    step = MINUTE * step_min
    end = T0 + np.timedelta64(24, "h")
    p = utilization_to_power(jobs, 64, NodePowerModel(1.5, idle), step, start=T0, end=end)
    assert np.all(p.values <= 64 * 1.5 + 1e-9)
    energy = float(np.sum(p.energy_kwh))
    oracle = minute_occupancy_energy(jobs, 64, 1.5, idle, T0, end)
    assert energy == pytest.approx(oracle, rel=1e-9, abs=1e-9)
