"""One week of operational water for a cluster.

Operational water has two parts. Direct water evaporates in the cooling
towers and follows the outside wet-bulb temperature. Indirect water is
consumed by the power plants that feed the site, so it follows the grid
mix. Here both are built from hourly weather and grid data and integrated
against a measured power trace.
"""

from pathlib import Path

from hpcwater.ingestion import load_default_parameter_db, load_series
from hpcwater.operational import build_intensity_series, operational_footprint

DATA = Path(__file__).resolve().parent / "data"

db = load_default_parameter_db()
site = db.site("polaris")

weather = load_series(DATA / "weather.csv", "weather")
mix = load_series(DATA / "mix.csv", "energy_mix", known_sources=db.source_factors)
power = load_series(DATA / "power.csv", "power")

intensity = build_intensity_series(weather, mix, site.pue, db.curve(site.wue_curve), db.source_factors)
footprint = operational_footprint(power, intensity)

print(f"site {site.name}: PUE {site.pue}, {len(intensity)} hourly steps")
print(f"energy      {footprint.energy_kwh:12,.0f} kWh")
print(f"direct      {footprint.direct.liters:12,.0f} L  ({footprint.direct_share:.1%})")
print(f"indirect    {footprint.indirect.liters:12,.0f} L  ({footprint.indirect_share:.1%})")
print(f"total       {footprint.total.liters:12,.0f} L  = {footprint.total.gallons:,.0f} gal")
print()

# The hourly frame shows how the two parts move through a day: WUE climbs
# in the warm afternoon while midday solar pulls the grid's water factor
# down, so the two partly cancel.
frame = intensity.to_frame()
by_hour = frame.groupby(frame.index.hour)[["wue", "ewf", "wi_direct", "wi_indirect", "wi"]].mean()
print("mean intensity by hour of day (L/kWh)")
print(by_hour.iloc[::3].round(3).to_string())
