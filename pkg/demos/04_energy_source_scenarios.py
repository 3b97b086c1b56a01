"""What if the grid were all nuclear? All coal? All hydro?

Swapping the generation mix changes carbon and water in different ways.
Low-carbon sources are not automatically low-water: hydro reservoirs lose
a lot to evaporation and wet-tower nuclear plants consume more per kWh
than gas. Each scenario keeps the weather, PUE and power trace fixed and
replaces only the mix.
"""

import json
from pathlib import Path

from hpcwater.analysis import BaselineBundle, Scenario, run_scenarios
from hpcwater.ingestion import load_default_parameter_db, load_series

DATA = Path(__file__).resolve().parent / "data"

db = load_default_parameter_db()
site = db.site("polaris")
bundle = BaselineBundle(
    weather=load_series(DATA / "weather.csv", "weather"),
    mix=load_series(DATA / "mix.csv", "energy_mix", known_sources=db.source_factors),
    pue=site.pue,
    curve=db.curve(site.wue_curve),
    factors=db.source_factors,
    power=load_series(DATA / "power.csv", "power"),
)

scenarios = [Scenario.from_dict(s) for s in json.loads((DATA / "scenarios.json").read_text())["scenarios"]]
results = run_scenarios(bundle, scenarios)

print(f"{'scenario':14s} {'water (L)':>12s} {'dWater':>8s} {'dIndirect':>10s} {'carbon (kg)':>12s} {'dCarbon':>8s}")
for r in results:
    print(
        f"{r.name:14s} {r.water_total.liters:12,.0f} {r.delta_water_pct:+7.1f}% {r.delta_indirect_pct:+9.1f}%"
        f" {r.carbon_total_g / 1000:12,.0f} {r.delta_carbon_pct:+7.1f}%"
    )
print()

best_carbon = min(results, key=lambda r: r.carbon_total_g)
best_water = min(results, key=lambda r: r.water_total.liters)
print(f"lowest carbon: {best_carbon.name}; lowest water: {best_water.name}")
# Direct water never moves: the cooling towers see the same weather in
# every scenario.
assert len({round(r.water_direct.liters, 6) for r in results}) == 1
