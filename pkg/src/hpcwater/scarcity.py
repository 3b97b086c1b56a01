"""Water-scarcity weighting of intensities and footprints."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import ANY_SITE, WaterVolume
from .errors import ParameterResolutionError, RangeViolation, ValidationError

WSI_RANGE = (0.1, 100.0)
SHARE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ScarcityIndex:
    region: str
    wsi: float

    def __post_init__(self):
        check_wsi(self.wsi, self.region)


def check_wsi(wsi, region: str = "") -> float:
    value = float(wsi.wsi if isinstance(wsi, ScarcityIndex) else wsi)
    if not math.isfinite(value) or not (WSI_RANGE[0] <= value <= WSI_RANGE[1]):
        where = f" for {region!r}" if region else ""
        raise RangeViolation(f"WSI{where} must lie in [{WSI_RANGE[0]}, {WSI_RANGE[1]}], got {value}")
    return value


@dataclass(frozen=True)
class GridSupplyShare:
    grid_region: str
    share: float
    wsi: ScarcityIndex

    def __post_init__(self):
        if not (0.0 <= self.share <= 1.0):
            raise ValidationError(f"grid {self.grid_region!r}: share must lie in [0, 1]")
        if isinstance(self.wsi, (int, float)):
            object.__setattr__(self, "wsi", ScarcityIndex(self.grid_region, float(self.wsi)))


def adjust_intensity_uniform(wi, wsi):
    """Scarcity-weighted water intensity, ``wi * wsi``."""
    return wi * check_wsi(wsi)


def adjust_intensity_split(wi_direct, wi_indirect, wsi_direct, wsi_indirect):
    """Weight the cooling and generation parts with their own scarcity indices.

    Equal indices take the uniform path, so the reduction to ``wi * wsi`` is
    bit-for-bit rather than merely algebraic.
    """
    w_d = check_wsi(wsi_direct)
    w_i = check_wsi(wsi_indirect)
    if w_d == w_i:
        return (wi_direct + wi_indirect) * w_d
    return wi_direct * w_d + wi_indirect * w_i


def effective_indirect_wsi(supplies: Iterable[GridSupplyShare]) -> float:
    """Share-weighted mean WSI of the grids feeding a site."""
    supplies = list(supplies)
    if not supplies:
        raise ValidationError("no grid supplies given")
    total = math.fsum(s.share for s in supplies)
    if abs(total - 1.0) > SHARE_TOLERANCE:
        raise ValidationError(f"grid supply shares sum to {total:.9g}, expected 1 within {SHARE_TOLERANCE}")
    return math.fsum(s.share * s.wsi.wsi for s in supplies)


def adjust_volume(volume: WaterVolume, wsi) -> WaterVolume:
    return WaterVolume(volume.liters * check_wsi(wsi))


def adjust_embodied(contributions, wsi_by_region: Mapping[str, float]) -> WaterVolume:
    """Embodied water with each device weighted by the WSI of its fab site.

    ``contributions`` is the output of :func:`hpcwater.embodied.device_contributions`.
    A ``"*"`` entry in ``wsi_by_region`` serves devices with no listed site.
    """
    total = 0.0
    for row in contributions:
        site = row.device.fab_site
        if site in wsi_by_region:
            wsi = wsi_by_region[site]
        elif ANY_SITE in wsi_by_region:
            wsi = wsi_by_region[ANY_SITE]
        else:
            raise ParameterResolutionError(f"no WSI for fab site {site!r} (device {row.device.label!r})")
        total += row.total.liters * check_wsi(wsi, site)
    return WaterVolume(total)


def adjusted_series(wi_direct: np.ndarray, wi_indirect: np.ndarray, mode: str, wsi_direct: float, wsi_indirect: float | None = None):
    """Apply ``mode`` in {"none", "uniform", "split"} to per-step intensities."""
    if mode == "none":
        return wi_direct + wi_indirect
    if mode == "uniform":
        return adjust_intensity_uniform(wi_direct + wi_indirect, wsi_direct)
    if mode == "split":
        if wsi_indirect is None:
            raise ValidationError("split scarcity weighting needs an indirect WSI")
        return adjust_intensity_split(wi_direct, wi_indirect, wsi_direct, wsi_indirect)
    raise ValidationError(f"unknown scarcity mode {mode!r}")
