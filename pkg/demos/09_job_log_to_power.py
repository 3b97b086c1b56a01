"""Power from a job log when no meter data exists.

Many centers publish scheduler logs but not power. A simple occupancy
model turns jobs into power: busy nodes draw their TDP, idle nodes a
fraction of it, and a job that covers part of a step counts for that
part. The resulting trace feeds the same water pipeline as measured power.
"""

from pathlib import Path

import numpy as np

from hpcwater.ingestion import NodePowerModel, load_default_parameter_db, load_job_log, load_series, utilization_to_power
from hpcwater.operational import build_intensity_series, operational_footprint

DATA = Path(__file__).resolve().parent / "data"

jobs = load_job_log(DATA / "jobs.csv")
print(f"{len(jobs)} jobs, {sum(j.nodes_used for j in jobs)} node allocations")

for idle in (0.0, 0.15, 0.3):
    trace = utilization_to_power(jobs, 560, NodePowerModel(2.4, idle_fraction=idle), np.timedelta64(1, "h"),
                                 start=np.datetime64("2023-07-10T00:00:00"), end=np.datetime64("2023-07-17T00:00:00"))
    print(f"idle fraction {idle:.2f}: mean {trace.values.mean():7.1f} kW, peak {trace.values.max():7.1f} kW,"
          f" energy {trace.energy_kwh.sum():9,.0f} kWh")

# Same pipeline as for metered power, using the 15 % idle assumption.
db = load_default_parameter_db()
site = db.site("fugaku")
trace = utilization_to_power(jobs, 560, NodePowerModel(2.4, idle_fraction=0.15), np.timedelta64(1, "h"),
                             start=np.datetime64("2023-07-10T00:00:00"), end=np.datetime64("2023-07-17T00:00:00"))
intensity = build_intensity_series(
    load_series(DATA / "weather.csv", "weather"),
    load_series(DATA / "mix.csv", "energy_mix", known_sources=db.source_factors),
    site.pue, db.curve(site.wue_curve), db.source_factors,
)
fp = operational_footprint(trace, intensity)
print(f"\nweek at {site.name}: {fp.total.liters:,.0f} L ({fp.direct_share:.0%} direct, {fp.indirect_share:.0%} indirect)")
