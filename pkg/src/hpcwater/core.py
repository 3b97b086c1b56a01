"""Domain types shared by the embodied and operational models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .errors import ParameterResolutionError, ValidationError

LITERS_PER_US_GALLON = 3.785411784

DEFAULT_YIELD = 0.875

# wildcard fab site used to resolve memory/storage parameters
ANY_SITE = "*"


@dataclass(frozen=True, order=True)
class WaterVolume:
    """A non-negative volume of water in liters."""

    liters: float = 0.0

    def __post_init__(self):
        value = float(self.liters)
        if not math.isfinite(value) or value < 0:
            raise ValidationError(f"water volume must be finite and >= 0, got {self.liters!r}")
        object.__setattr__(self, "liters", value)

    @classmethod
    def from_gallons(cls, gallons: float) -> "WaterVolume":
        return cls(gallons * LITERS_PER_US_GALLON)

    @property
    def gallons(self) -> float:
        return self.liters / LITERS_PER_US_GALLON

    def __add__(self, other):
        if isinstance(other, WaterVolume):
            return WaterVolume(self.liters + other.liters)
        return NotImplemented

    def __radd__(self, other):
        # lets builtin sum() start from 0
        if other == 0:
            return self
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, WaterVolume):
            return WaterVolume(self.liters - other.liters)
        return NotImplemented

    def __mul__(self, factor):
        if isinstance(factor, (int, float)):
            return WaterVolume(self.liters * factor)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, WaterVolume):
            return self.liters / other.liters
        if isinstance(other, (int, float)):
            return WaterVolume(self.liters / other)
        return NotImplemented

    def __float__(self):
        return self.liters


class DeviceKind(str, Enum):
    CPU = "CPU"
    GPU = "GPU"
    DRAM = "DRAM"
    SSD = "SSD"
    HDD = "HDD"

    @property
    def is_processor(self) -> bool:
        return self in (DeviceKind.CPU, DeviceKind.GPU)


@dataclass(frozen=True)
class DeviceSpec:
    """One inventory row: ``count`` identical devices.

    Processors carry ``die_area`` (mm²) and ``process_node`` (nm); memory and
    storage carry ``capacity_gb``. ``transport_disposal_l`` is a flat per-device
    allowance for transportation and end-of-life water.
    """

    kind: DeviceKind
    count: int = 1
    n_ic: int = 1
    die_area: float = 0.0
    process_node: Optional[float] = None
    capacity_gb: float = 0.0
    yield_rate: float = DEFAULT_YIELD
    fab_site: str = ANY_SITE
    name: str = ""
    transport_disposal_l: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DeviceKind(self.kind))
        if int(self.count) != self.count or self.count < 1:
            raise ValidationError(f"{self.label}: count must be a positive integer, got {self.count!r}")
        if int(self.n_ic) != self.n_ic or self.n_ic < 1:
            raise ValidationError(f"{self.label}: n_ic must be a positive integer, got {self.n_ic!r}")
        for attr in ("die_area", "capacity_gb", "transport_disposal_l"):
            value = getattr(self, attr)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{self.label}: {attr} must be finite and >= 0, got {value!r}")
        if not (0.0 < self.yield_rate <= 1.0):
            raise ValidationError(f"{self.label}: yield_rate must lie in (0, 1], got {self.yield_rate!r}")
        if self.kind.is_processor:
            if self.die_area <= 0:
                raise ValidationError(f"{self.label}: processors require die_area > 0 mm²")
            if self.process_node is None or self.process_node <= 0:
                raise ValidationError(f"{self.label}: processors require process_node > 0 nm")

    @property
    def label(self) -> str:
        return self.name or self.kind.value


@dataclass(frozen=True)
class ProcessParams:
    """Manufacturing water factors for one (process node, fab site).

    ``upw``, ``pcw`` and ``wpa`` are liters per cm² of die area; ``wpc_*``
    are liters per GB; ``w_ic`` is liters per packaged IC.
    """

    site: str = ANY_SITE
    node: Optional[float] = None
    w_ic: float = 0.6
    upw: float = 0.0
    pcw: float = 0.0
    wpa: float = 0.0
    wpc_dram: float = 0.8
    wpc_ssd: float = 0.022
    wpc_hdd: float = 0.033

    def __post_init__(self):
        for attr in ("w_ic", "upw", "pcw", "wpa", "wpc_dram", "wpc_ssd", "wpc_hdd"):
            value = getattr(self, attr)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"process params ({self.node}, {self.site}): {attr} must be finite and >= 0")
        if self.node is not None and self.node <= 0:
            raise ValidationError(f"process node must be > 0 nm, got {self.node!r}")

    @property
    def per_area(self) -> float:
        return self.upw + self.pcw + self.wpa

    def wpc(self, kind: DeviceKind) -> float:
        return {DeviceKind.DRAM: self.wpc_dram, DeviceKind.SSD: self.wpc_ssd, DeviceKind.HDD: self.wpc_hdd}[kind]


ParamsKey = tuple  # (node or None, site)


@dataclass(frozen=True)
class HardwareInventory:
    system_name: str
    devices: tuple = ()
    params_by_node_and_site: Mapping[ParamsKey, ProcessParams] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))

    def resolve(self, device: DeviceSpec) -> ProcessParams:
        """Find the parameter row for ``device``.

        Processors need an exact (node, site) entry. Memory and storage fall
        back to the site-wide entry and then the wildcard entry.
        """
        table = self.params_by_node_and_site
        if device.kind.is_processor:
            keys = [(float(device.process_node), device.fab_site)]
        else:
            keys = []
            if device.process_node is not None:
                keys.append((float(device.process_node), device.fab_site))
            keys += [(None, device.fab_site), (None, ANY_SITE)]
        for key in keys:
            if key in table:
                return table[key]
        raise ParameterResolutionError(
            f"no process parameters for device {device.label!r} "
            f"(kind={device.kind.value}, node={device.process_node}, site={device.fab_site!r})"
        )


@dataclass(frozen=True)
class KindWater:
    packaging: WaterVolume = WaterVolume()
    manufacturing: WaterVolume = WaterVolume()
    transport_disposal: WaterVolume = WaterVolume()

    @property
    def total(self) -> WaterVolume:
        return self.packaging + self.manufacturing + self.transport_disposal


@dataclass(frozen=True)
class EmbodiedBreakdown:
    per_kind: Mapping[DeviceKind, KindWater]
    total: WaterVolume

    def shares(self) -> dict:
        """Fraction of the total attributable to each device kind."""
        if self.total.liters == 0:
            return {kind: 0.0 for kind in self.per_kind}
        return {kind: part.total.liters / self.total.liters for kind, part in self.per_kind.items()}

    @property
    def packaging(self) -> WaterVolume:
        return sum((p.packaging for p in self.per_kind.values()), WaterVolume())

    @property
    def manufacturing(self) -> WaterVolume:
        return sum((p.manufacturing for p in self.per_kind.values()), WaterVolume())
