"""Embodied (manufacturing + packaging) water of a hardware inventory."""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    DeviceKind,
    DeviceSpec,
    EmbodiedBreakdown,
    HardwareInventory,
    KindWater,
    ProcessParams,
    WaterVolume,
)
from .errors import ValidationError

MM2_PER_CM2 = 100.0


def packaging_water(inventory: HardwareInventory) -> WaterVolume:
    """Sum of ``w_ic * n_ic * count`` over every device."""
    total = 0.0
    for device in inventory.devices:
        params = inventory.resolve(device)
        total += params.w_ic * device.n_ic * device.count
    return WaterVolume(total)


def manufacturing_water_processor(spec: DeviceSpec, params: ProcessParams) -> WaterVolume:
    """Fab water of CPUs/GPUs: die area times per-area water, inflated by 1/yield."""
    if not spec.kind.is_processor:
        raise ValidationError(f"{spec.label}: processor model applies to CPU/GPU, not {spec.kind.value}")
    if not (0.0 < spec.yield_rate <= 1.0):
        raise ValidationError(f"{spec.label}: yield_rate must lie in (0, 1]")
    if spec.die_area <= 0:
        raise ValidationError(f"{spec.label}: die_area must be > 0")
    area_cm2 = spec.die_area / MM2_PER_CM2
    return WaterVolume(area_cm2 * params.per_area / spec.yield_rate * spec.count)


def manufacturing_water_storage(spec: DeviceSpec, params: ProcessParams) -> WaterVolume:
    """Fab water of DRAM/SSD/HDD: water-per-GB times capacity."""
    if spec.kind.is_processor:
        raise ValidationError(f"{spec.label}: capacity model applies to DRAM/SSD/HDD, not {spec.kind.value}")
    if spec.capacity_gb < 0:
        raise ValidationError(f"{spec.label}: capacity_gb must be >= 0")
    return WaterVolume(params.wpc(spec.kind) * spec.capacity_gb * spec.count)


def manufacturing_water(spec: DeviceSpec, params: ProcessParams) -> WaterVolume:
    if spec.kind.is_processor:
        return manufacturing_water_processor(spec, params)
    return manufacturing_water_storage(spec, params)


@dataclass(frozen=True)
class DeviceWater:
    device: DeviceSpec
    packaging: WaterVolume
    manufacturing: WaterVolume
    transport_disposal: WaterVolume

    @property
    def total(self) -> WaterVolume:
        return self.packaging + self.manufacturing + self.transport_disposal


def device_contributions(inventory: HardwareInventory) -> list[DeviceWater]:
    rows = []
    for device in inventory.devices:
        params = inventory.resolve(device)
        rows.append(
            DeviceWater(
                device=device,
                packaging=WaterVolume(params.w_ic * device.n_ic * device.count),
                manufacturing=manufacturing_water(device, params),
                transport_disposal=WaterVolume(device.transport_disposal_l * device.count),
            )
        )
    return rows


def embodied_footprint(inventory: HardwareInventory) -> EmbodiedBreakdown:
    """Per-kind packaging/manufacturing water and the grand total."""
    acc: dict[DeviceKind, list[float]] = {}
    for row in device_contributions(inventory):
        slot = acc.setdefault(row.device.kind, [0.0, 0.0, 0.0])
        slot[0] += row.packaging.liters
        slot[1] += row.manufacturing.liters
        slot[2] += row.transport_disposal.liters
    per_kind = {
        kind: KindWater(WaterVolume(p), WaterVolume(m), WaterVolume(t))
        for kind, (p, m, t) in sorted(acc.items(), key=lambda kv: list(DeviceKind).index(kv[0]))
    }
    total = WaterVolume(sum(part.total.liters for part in per_kind.values()))
    return EmbodiedBreakdown(per_kind=per_kind, total=total)
