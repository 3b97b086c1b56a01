"""Do water and carbon intensity move together over a year?

A synthetic year for a site whose grid leans on hydro in spring and on gas
in winter: water intensity peaks in summer (hot, so cooling towers work
harder), while carbon intensity peaks in winter. A rank correlation and
min-max normalized monthly traces make the mismatch visible.
"""

import numpy as np

from hpcwater.analysis import compare_series, intensity_columns
from hpcwater.ingestion import load_default_parameter_db
from hpcwater.operational import EnergyMixSeries, WeatherSeries, build_intensity_series

db = load_default_parameter_db()
step = np.timedelta64(3, "h")
times = np.arange(np.datetime64("2023-01-01T00"), np.datetime64("2024-01-01T00"), step).astype("datetime64[s]")
day = (times - times[0]) / np.timedelta64(1, "D")

temp = 13 - 11 * np.cos(2 * np.pi * (day - 20) / 365) + 4 * np.sin(2 * np.pi * day)
weather = WeatherSeries(times, temp, np.full(len(times), 60.0), step)

hydro = 0.15 + 0.15 * np.sin(2 * np.pi * (day - 60) / 365)   # spring melt
gas = 0.45 + 0.15 * np.cos(2 * np.pi * day / 365)            # winter heating demand
nuclear = 0.25 * np.ones_like(day)
wind = 1 - hydro - gas - nuclear
mix = EnergyMixSeries(times, ("hydro", "gas", "nuclear_wet_tower", "wind"), np.column_stack([hydro, gas, nuclear, wind]), step)

intensity = build_intensity_series(weather, mix, 1.2, db.curve("default"), db.source_factors)
comparison = compare_series(*intensity_columns(intensity))

monthly = comparison.monthly.copy()
monthly["wi_norm"] = (monthly.wi - monthly.wi.min()) / (monthly.wi.max() - monthly.wi.min())
monthly["ci_norm"] = (monthly.ci - monthly.ci.min()) / (monthly.ci.max() - monthly.ci.min())
print(monthly.round(3).to_string())
print()
print(f"{comparison.method} rank correlation of WI and CI: {comparison.rank_correlation:+.2f}")
print("water-intensity peak month:", monthly.wi.idxmax(), " carbon-intensity peak month:", monthly.ci.idxmax())
