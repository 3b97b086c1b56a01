"""When should a six-hour job start?

Both the grid's carbon intensity and the site's water intensity vary
through the day, but not in step. Cooling water peaks in the hot
afternoon, while midday solar makes the grid cleaner and (here) less
thirsty at the same time. Ranking a handful of candidate start times by
each metric shows that the best time for carbon need not be the best time
for water.
"""

from pathlib import Path

from hpcwater.analysis import rank_start_times
from hpcwater.ingestion import load_candidates, load_default_parameter_db, load_series
from hpcwater.operational import build_intensity_series

DATA = Path(__file__).resolve().parent / "data"

db = load_default_parameter_db()
site = db.site("marconi")
weather = load_series(DATA / "weather.csv", "weather")
mix = load_series(DATA / "mix.csv", "energy_mix", known_sources=db.source_factors)
intensity = build_intensity_series(weather, mix, site.pue, db.curve(site.wue_curve), db.source_factors)

candidates = load_candidates(DATA / "candidates.csv")
ranking = rank_start_times(candidates, duration_hours=6, power_profile=350.0, intensity=intensity)

table = ranking.table.copy()
table["start"] = table["start"].dt.strftime("%a %H:%M")
print(table[["start", "energy_kwh", "water_l", "carbon_g", "water_rank", "carbon_rank"]].round(1).to_string(index=False))
print()
print("best for water :", ranking.best_for_water)
print("best for carbon:", ranking.best_for_carbon)
# Every candidate uses the same energy; only the timing differs.
assert table["energy_kwh"].nunique() == 1
