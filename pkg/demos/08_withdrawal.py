"""From consumption to withdrawal.

Consumption is what the site evaporates or otherwise loses. Withdrawal is
what it takes in, which also covers the water it later discharges. The
discharge is scaled by where it goes and how dirty it is. Water reused on
site is subtracted, and the remaining intake is split between potable and
non-potable sources that carry their own scarcity weights.
"""

import json
from pathlib import Path

from hpcwater.core import WaterVolume
from hpcwater.withdrawal import WithdrawalParams, withdrawal

DATA = Path(__file__).resolve().parent / "data"

consumption = WaterVolume(3.1e6)  # e.g. a week of operational water, liters
entry = json.loads((DATA / "withdrawal.json").read_text())
params = WithdrawalParams(discharge_actual=entry.pop("discharge_actual_l"), **entry)

w = withdrawal(consumption, params)
for label, vol in (
    ("consumption", consumption),
    ("reported discharge", params.discharge_actual),
    ("adjusted discharge", w.adjusted_discharge),
    ("reused on site", w.reuse),
    ("gross withdrawal", w.gross),
    ("net withdrawal", w.net),
    ("  potable", w.potable),
    ("  non-potable", w.nonpotable),
    ("  potable, weighted", w.potable_weighted),
    ("  non-potable, weighted", w.nonpotable_weighted),
):
    print(f"{label:24s} {vol.liters:14,.0f} L")

# With neutral parameters withdrawal collapses to consumption + discharge.
neutral = withdrawal(consumption, WithdrawalParams(discharge_actual=params.discharge_actual))
assert neutral.gross.liters - params.discharge_actual.liters == consumption.liters
