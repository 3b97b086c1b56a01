"""Where does embodied water outweigh operational water?

With both sides weighted by scarcity (manufacturing WSI at the fab,
operational WSI at the data center), the ratio of embodied to operational
water is a simple function of the two indices. The line where the ratio
equals one splits the plane into an embodied-dominated corner and an
operations-dominated corner. Thirstier operation (higher WUE or EWF)
moves that line and shrinks the embodied-dominated region.
"""

from pathlib import Path

import numpy as np

from hpcwater.analysis import RatioMapSpec, embodied_operational_ratio_map
from hpcwater.ingestion import load_default_parameter_db, load_inventory

DATA = Path(__file__).resolve().parent / "data"

db = load_default_parameter_db()
inventory = load_inventory(DATA / "inventory.json", db)
axis = np.geomspace(0.1, 100, 13)

# one year of operation at 2 MW average draw
energy_kwh = 2000.0 * 24 * 365

for label, wue, ewf in (("dry climate, clean grid", 0.3, 0.8), ("typical", 1.0, 1.8), ("hot climate, thirsty grid", 2.5, 4.0)):
    spec = RatioMapSpec(axis, axis, energy_kwh=energy_kwh, wue=wue, pue=1.3, ewf=ewf, inventory=inventory)
    rmap = embodied_operational_ratio_map(spec)
    print(f"{label:27s} embodied {spec.embodied.liters / 1e6:6.2f} ML, operational {spec.operational.liters / 1e6:7.2f} ML,"
          f" embodied-dominated cells {rmap.embodied_dominant_fraction:5.1%}")

print()
print("ratio map for the typical case (rows: operational WSI, columns: manufacturing WSI)")
spec = RatioMapSpec(axis, axis, energy_kwh=energy_kwh, wue=1.0, pue=1.3, ewf=1.8, inventory=inventory)
rmap = embodied_operational_ratio_map(spec)
header = "op\\mfg " + " ".join(f"{m:6.2g}" for m in axis[::3])
print(header)
for o, row in zip(axis[::3], rmap.ratio[::3, ::3]):
    print(f"{o:6.2g} " + " ".join(f"{v:6.2f}" for v in row))
print()
print("unit-ratio line (mfg WSI at which embodied equals operational):")
for m, o in rmap.contour[::3]:
    print(f"  op WSI {o:7.3g} -> mfg WSI {m:7.3g}")
