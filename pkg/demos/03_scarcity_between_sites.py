"""Same liters, different stakes.

A liter drawn from a wet basin and a liter drawn from a stressed one are
not equivalent. Weighting water intensity by a water-scarcity index (WSI)
can reorder sites: the one that uses less water per kWh may still be the
worse place to run once local scarcity is counted. Cooling water is drawn
locally while generation water comes from wherever the grid's plants are,
so the two parts get separate indices.
"""

import numpy as np

from hpcwater.ingestion import load_default_parameter_db
from hpcwater.operational import ewf_of_mix, water_intensity
from hpcwater.scarcity import adjust_intensity_split, adjust_intensity_uniform

db = load_default_parameter_db()

# illustrative operating points: summer WUE and a representative grid mix
operating = {
    "marconi": (1.1, {"gas": 0.45, "hydro": 0.2, "solar": 0.15, "wind": 0.1, "biomass": 0.1}),
    "fugaku": (0.9, {"gas": 0.35, "coal": 0.3, "nuclear_wet_tower": 0.1, "solar": 0.15, "hydro": 0.1}),
    "polaris": (1.4, {"nuclear_wet_tower": 0.55, "gas": 0.2, "coal": 0.15, "wind": 0.1}),
    "frontier": (0.6, {"coal": 0.25, "nuclear_wet_tower": 0.4, "hydro": 0.15, "gas": 0.2}),
}

rows = []
for name, (wue, mix) in operating.items():
    site = db.site(name)
    wi = water_intensity(wue, site.pue, ewf_of_mix(mix, db.source_factors))
    wsi_direct, wsi_indirect = db.site_wsi(site)
    rows.append((
        name,
        wi.wi,
        adjust_intensity_uniform(wi.wi, wsi_direct),
        adjust_intensity_split(wi.wi_direct, wi.wi_indirect, wsi_direct, wsi_indirect),
        wsi_direct,
        wsi_indirect,
    ))

print(f"{'site':10s} {'WI':>7s} {'WI*WSI':>9s} {'split':>9s} {'WSI dir':>8s} {'WSI ind':>8s}")
for name, wi, uni, split, wd, wi_ in rows:
    print(f"{name:10s} {wi:7.2f} {uni:9.1f} {split:9.1f} {wd:8.1f} {wi_:8.1f}")
print()

raw_order = [r[0] for r in sorted(rows, key=lambda r: r[1])]
weighted_order = [r[0] for r in sorted(rows, key=lambda r: r[3])]
print("ranked by raw WI:        ", " < ".join(raw_order))
print("ranked by scarcity (split):", " < ".join(weighted_order))

# Polaris draws from two grid regions; its indirect index is their
# share-weighted mean.
supplies = db.site("polaris").grid_supply
print()
print("polaris grid supply:", ", ".join(f"{g['grid_region']} {g['share']:.0%}" for g in supplies),
      f"-> indirect WSI {db.site_wsi('polaris')[1]:.1f}")
print("spread of split-weighted intensity across sites:", f"{np.ptp([r[3] for r in rows]):.1f} L-eq/kWh")
