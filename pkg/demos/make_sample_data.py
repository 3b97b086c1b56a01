"""Writes the synthetic input files under demos/data/.

One summer week at hourly resolution for a mid-latitude site: a diurnal
temperature swing, a grid whose solar share peaks at midday, a job log and
the power trace it implies. Everything is deterministic (fixed seed) so
the demos and the CLI walkthrough give the same numbers on every machine.
"""

import json
from pathlib import Path

import numpy as np

from hpcwater.ingestion import JobRecord, NodePowerModel, utilization_to_power, write_series
from hpcwater.operational import EnergyMixSeries, WeatherSeries

HERE = Path(__file__).resolve().parent / "data"
HERE.mkdir(exist_ok=True)

rng = np.random.default_rng(42)
hour = np.timedelta64(1, "h")
start = np.datetime64("2023-07-10T00:00:00", "s")
n = 24 * 7
hours = np.arange(n)
times = start + hour * hours

# weather: warm afternoons, humid nights
temp = 24 + 7 * np.sin(2 * np.pi * (hours - 9) / 24) + rng.normal(0, 0.8, n)
rh = np.clip(62 - 18 * np.sin(2 * np.pi * (hours - 9) / 24) + rng.normal(0, 3, n), 15, 95)
write_series(WeatherSeries(times, temp.round(2), rh.round(1), hour), HERE / "weather.csv")

# grid mix: solar displaces gas around noon, the rest is steady
solar = np.clip(0.35 * np.sin(2 * np.pi * (hours - 6) / 24), 0, None)
shares = np.column_stack([
    0.22 * np.ones(n),          # nuclear
    0.08 * np.ones(n),          # hydro
    0.12 * np.ones(n),          # wind
    solar,                      # solar
    0.58 - solar,               # gas takes up the slack
])
shares = shares.round(4)
shares[:, -1] = 1 - shares[:, :-1].sum(axis=1)
sources = ("nuclear_wet_tower", "hydro", "wind", "solar", "gas")
write_series(EnergyMixSeries(times, sources, shares, hour), HERE / "mix.csv")

# job log for a 560-node machine, then the occupancy-based power trace
total_nodes, tdp_kw = 560, 2.4
jobs = []
t = 0
for i in range(120):
    t += int(rng.integers(10, 90))
    if t >= n * 60 - 30:
        break
    length = int(rng.integers(30, 14 * 60))
    nodes = int(rng.choice([8, 16, 32, 64, 128]))
    jobs.append((f"job{i:03d}", t, min(t + length, n * 60), nodes))

# keep only jobs that fit on the machine alongside the ones already admitted
busy = np.zeros(n * 60, dtype=int)
kept = []
for job_id, s, e, nodes in jobs:
    if busy[s:e].max() + nodes <= total_nodes:
        busy[s:e] += nodes
        kept.append((job_id, s, e, nodes))

minute = np.timedelta64(1, "m")
with open(HERE / "jobs.csv", "w") as fh:
    fh.write("job_id,start,end,nodes\n")
    for job_id, s, e, nodes in kept:
        a = np.datetime_as_string(start + minute * s, unit="s")
        b = np.datetime_as_string(start + minute * e, unit="s")
        fh.write(f"{job_id},{a}Z,{b}Z,{nodes}\n")

records = [JobRecord(j, start + minute * s, start + minute * e, k) for j, s, e, k in kept]
power = utilization_to_power(records, total_nodes, NodePowerModel(tdp_kw, idle_fraction=0.15), hour,
                             start=start, end=start + n * hour)
write_series(power, HERE / "power.csv")

# start-time candidates for a six-hour job, spread over two days
with open(HERE / "candidates.csv", "w") as fh:
    fh.write("start\n")
    for h in (0, 4, 8, 12, 16, 20, 30):
        fh.write(np.datetime_as_string(start + 24 * hour + h * hour, unit="s") + "Z\n")

scenarios = {
    "scenarios": [
        {"name": "current mix", "mix": "unchanged"},
        {"name": "all nuclear", "mix": {"nuclear_wet_tower": 1.0}},
        {"name": "all coal", "mix": {"coal": 1.0}},
        {"name": "all hydro", "mix": {"hydro": 1.0}},
        {"name": "all wind", "mix": {"wind": 1.0}},
        {"name": "all solar", "mix": {"solar": 1.0}},
    ]
}
(HERE / "scenarios.json").write_text(json.dumps(scenarios, indent=2) + "\n")

inventory = {
    "system_name": "gpu-cluster",
    "devices": [
        {"name": "A100-class GPU", "kind": "GPU", "count": 2240, "n_ic": 9, "die_area": 826,
         "process_node": 7, "fab_site": "TSMC"},
        {"name": "EPYC-class CPU", "kind": "CPU", "count": 560, "n_ic": 9, "die_area": 1008,
         "process_node": 7, "fab_site": "TSMC"},
        {"name": "host DRAM", "kind": "DRAM", "count": 560, "n_ic": 16, "capacity_gb": 512},
        {"name": "node-local NVMe", "kind": "SSD", "count": 1120, "n_ic": 12, "capacity_gb": 1600},
        {"name": "archive disks", "kind": "HDD", "count": 960, "n_ic": 4, "capacity_gb": 16000},
    ],
}
(HERE / "inventory.json").write_text(json.dumps(inventory, indent=2) + "\n")

withdrawal = {"discharge_actual_l": 2.0e6, "outfall_factor": 0.8, "pollutant_factor": 1.5,
              "reuse_rate": 0.25, "beta_potable": 0.7, "beta_nonpotable": 0.3,
              "scarcity_potable": 0.6, "scarcity_nonpotable": 0.2}
(HERE / "withdrawal.json").write_text(json.dumps(withdrawal, indent=2) + "\n")

print(f"wrote {len(list(HERE.iterdir()))} files to {HERE} ({len(kept)} jobs)")
