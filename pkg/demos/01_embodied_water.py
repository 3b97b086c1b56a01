"""Embodied water of a GPU cluster.

Before a machine runs a single job, water has already gone into it. Fabs
use it to rinse and cool wafers, and every packaged chip adds a little
more. Memory and storage carry their own per-gigabyte share. This
script loads a hardware inventory, prices it with the shipped parameter
database and shows where the liters come from.
"""

from pathlib import Path

from hpcwater.embodied import device_contributions, embodied_footprint
from hpcwater.ingestion import load_default_parameter_db, load_inventory
from hpcwater.scarcity import adjust_embodied

DATA = Path(__file__).resolve().parent / "data"

db = load_default_parameter_db()
inventory = load_inventory(DATA / "inventory.json", db)
breakdown = embodied_footprint(inventory)

print(f"system: {inventory.system_name}")
print(f"embodied water: {breakdown.total.liters:,.0f} L ({breakdown.total.gallons:,.0f} gal)")
print(f"  packaging     {breakdown.packaging.liters:12,.0f} L")
print(f"  manufacturing {breakdown.manufacturing.liters:12,.0f} L")
print()

# Per device kind. On a GPU-heavy machine the accelerators dominate,
# because each one is a large die on an advanced node.
shares = breakdown.shares()
for kind, part in breakdown.per_kind.items():
    print(f"{kind.value:5s} {part.total.liters:12,.0f} L  {shares[kind]:6.1%}")
print()

# Per device line, useful when deciding which part of a procurement to
# scrutinize first.
for row in sorted(device_contributions(inventory), key=lambda r: -r.total.liters):
    print(f"{row.device.label:18s} {row.total.liters:12,.0f} L")
print()

# Fabs sit in basins with very different water stress. Weighting each
# device by the scarcity index of its fab site gives a different picture
# from the raw volume.
wsi = {region: idx.wsi for region, idx in db.wsi.items()}
weighted = adjust_embodied(device_contributions(inventory), wsi)
print(f"scarcity-weighted embodied water: {weighted.liters:,.0f} L-eq")
print(f"  (raw volume scaled by {weighted.liters / breakdown.total.liters:.1f}x on average)")
