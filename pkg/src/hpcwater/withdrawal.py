"""Water withdrawal from consumption, adjusted discharge and reuse."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import WaterVolume
from .errors import ValidationError


@dataclass(frozen=True)
class WithdrawalParams:
    """Discharge, reuse and source-split parameters of one site.

    ``outfall_factor`` and ``pollutant_factor`` scale the reported discharge;
    the defaults are neutral, so withdrawal reduces to consumption plus
    reported discharge.
    """

    discharge_actual: WaterVolume = WaterVolume()
    outfall_factor: float = 1.0
    pollutant_factor: float = 1.0
    reuse_rate: float = 0.0
    beta_potable: float = 1.0
    beta_nonpotable: float = 0.0
    scarcity_potable: float = 1.0
    scarcity_nonpotable: float = 1.0

    def __post_init__(self):
        if not isinstance(self.discharge_actual, WaterVolume):
            object.__setattr__(self, "discharge_actual", WaterVolume(self.discharge_actual))
        for attr in ("outfall_factor", "pollutant_factor"):
            value = getattr(self, attr)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{attr} must be finite and >= 0, got {value}")
        for attr in ("reuse_rate", "beta_potable", "beta_nonpotable", "scarcity_potable", "scarcity_nonpotable"):
            value = getattr(self, attr)
            if not (0.0 <= value <= 1.0):
                raise ValidationError(f"{attr} must lie in [0, 1], got {value}")
        if abs(self.beta_potable + self.beta_nonpotable - 1.0) > 1e-9:
            raise ValidationError("beta_potable + beta_nonpotable must equal 1")


@dataclass(frozen=True)
class Withdrawal:
    gross: WaterVolume
    net: WaterVolume
    potable: WaterVolume
    nonpotable: WaterVolume
    potable_weighted: WaterVolume
    nonpotable_weighted: WaterVolume
    adjusted_discharge: WaterVolume
    reuse: WaterVolume


def adjusted_discharge(params: WithdrawalParams) -> WaterVolume:
    return WaterVolume(params.discharge_actual.liters * params.outfall_factor * params.pollutant_factor)


def water_reuse(discharge: WaterVolume, rho: float) -> WaterVolume:
    if not (0.0 <= rho <= 1.0):
        raise ValidationError(f"reuse rate must lie in [0, 1], got {rho}")
    return WaterVolume(discharge.liters * rho)


def withdrawal(consumption: WaterVolume, params: WithdrawalParams) -> Withdrawal:
    """Gross and net withdrawal plus the potable/non-potable split.

    Gross is consumption plus adjusted discharge; reuse displaces fresh
    intake, so net is gross minus reuse.
    """
    discharge = adjusted_discharge(params)
    reuse = water_reuse(discharge, params.reuse_rate)
    gross = consumption + discharge
    net_l = gross.liters - reuse.liters
    if net_l < 0:
        raise ValidationError(f"net withdrawal is negative ({net_l} L)")
    net = WaterVolume(net_l)
    potable = net * params.beta_potable
    nonpotable = net * params.beta_nonpotable
    return Withdrawal(
        gross=gross,
        net=net,
        potable=potable,
        nonpotable=nonpotable,
        potable_weighted=potable * params.scarcity_potable,
        nonpotable_weighted=nonpotable * params.scarcity_nonpotable,
        adjusted_discharge=discharge,
        reuse=reuse,
    )
