"""What-if studies built on the footprint models.

* energy-source substitution scenarios
* ranking of job start times by water and by carbon
* embodied/operational ratio maps over manufacturing and operational WSI
* water-vs-carbon intensity comparison (monthly means, min-max traces,
  rank correlation)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import stats

from .core import HardwareInventory, WaterVolume
from .embodied import embodied_footprint
from .errors import AlignmentError, CoverageError, SingularityError, ValidationError
from .operational import (
    EnergyMixSeries,
    IntensitySeries,
    PowerTrace,
    SourceFactors,
    WeatherSeries,
    WueCurve,
    build_intensity_series,
    operational_footprint,
    validate_shares,
)
from .timeseries import SECOND, TimeSeries, as_times

UNCHANGED = "unchanged"

# relative tolerance under which two candidate totals count as a tie
TIE_RTOL = 1e-12


# -- scenarios ----------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A named grid-mix override; ``mix_override`` is ``"unchanged"`` or a shares map."""

    name: str
    mix_override: Union[str, Mapping[str, float]] = UNCHANGED

    def __post_init__(self):
        if isinstance(self.mix_override, str):
            if self.mix_override != UNCHANGED:
                raise ValidationError(f"scenario {self.name!r}: mix must be {UNCHANGED!r} or a shares map")
        else:
            object.__setattr__(self, "mix_override", {k: float(v) for k, v in dict(self.mix_override).items()})
            validate_shares(self.mix_override, f"scenario {self.name!r}")

    @property
    def is_unchanged(self) -> bool:
        return isinstance(self.mix_override, str)

    @classmethod
    def from_dict(cls, entry: Mapping) -> "Scenario":
        mix = entry.get("mix", entry.get("mix_override", UNCHANGED))
        return cls(str(entry["name"]), mix)


@dataclass(frozen=True, eq=False)
class BaselineBundle:
    weather: WeatherSeries
    mix: EnergyMixSeries
    pue: Union[float, TimeSeries]
    curve: WueCurve
    factors: Mapping[str, SourceFactors]
    power: PowerTrace
    clamp_weather: bool = False

    def intensity(self, mix: Optional[EnergyMixSeries] = None) -> IntensitySeries:
        return build_intensity_series(
            self.weather, mix if mix is not None else self.mix, self.pue, self.curve, self.factors,
            clamp_weather=self.clamp_weather,
        )


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    water_direct: WaterVolume
    water_indirect: WaterVolume
    water_total: WaterVolume
    carbon_total_g: float
    delta_water_pct: Optional[float] = None
    delta_direct_pct: Optional[float] = None
    delta_indirect_pct: Optional[float] = None
    delta_carbon_pct: Optional[float] = None


def _pct(new: float, base: float) -> Optional[float]:
    if base == 0:
        return 0.0 if new == 0 else None
    return (new - base) / base * 100.0


def _evaluate(baseline: BaselineBundle, mix: Optional[EnergyMixSeries]):
    fp = operational_footprint(baseline.power, baseline.intensity(mix))
    return fp, math.fsum(fp.series["carbon_g"])


def run_scenario(baseline: BaselineBundle, scenario: Scenario, *, reference=None) -> ScenarioResult:
    """Recompute water and carbon with the scenario's mix, same power trace.

    Overrides touch only EWF and carbon intensity; WUE stays weather-driven.
    Deltas are percentages relative to the unmodified baseline.
    """
    base_fp, base_carbon = reference if reference is not None else _evaluate(baseline, None)
    if scenario.is_unchanged:
        fp, carbon = base_fp, base_carbon
    else:
        fp, carbon = _evaluate(baseline, baseline.mix.with_shares(scenario.mix_override))
    return ScenarioResult(
        name=scenario.name,
        water_direct=fp.direct,
        water_indirect=fp.indirect,
        water_total=fp.total,
        carbon_total_g=carbon,
        delta_water_pct=_pct(fp.total.liters, base_fp.total.liters),
        delta_direct_pct=_pct(fp.direct.liters, base_fp.direct.liters),
        delta_indirect_pct=_pct(fp.indirect.liters, base_fp.indirect.liters),
        delta_carbon_pct=_pct(carbon, base_carbon),
    )


def run_scenarios(baseline: BaselineBundle, scenarios: Sequence[Scenario]) -> list[ScenarioResult]:
    reference = _evaluate(baseline, None)
    return [run_scenario(baseline, s, reference=reference) for s in scenarios]


# -- start-time ranking -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StartTimeRanking:
    table: pd.DataFrame
    water_ranking: list
    carbon_ranking: list

    @property
    def best_for_water(self):
        return self.water_ranking[0]

    @property
    def best_for_carbon(self):
        return self.carbon_ranking[0]


def _profile(power_profile, duration: np.timedelta64):
    """Return (edges relative to job start in seconds, kW per segment)."""
    dur_s = duration / SECOND
    if isinstance(power_profile, TimeSeries):
        if not power_profile.is_regular:
            raise ValidationError("power profile must be gap-free")
        step_s = power_profile.step / SECOND
        kw = np.asarray(power_profile.values, dtype=float)
        if len(kw) * step_s < dur_s:
            raise ValidationError("power profile is shorter than the job duration")
        n = int(math.ceil(dur_s / step_s))
        edges = np.minimum(np.arange(n + 1) * step_s, dur_s)
        return edges, kw[:n]
    kw = float(power_profile)
    if kw < 0:
        raise ValidationError("power must be >= 0 kW")
    return np.array([0.0, dur_s]), np.array([kw])


def _window_totals(intensity: IntensitySeries, start: np.datetime64, edges_s, kw):
    """Exact integrals of kW x intensity over a window, piecewise constant in both."""
    step_s = intensity.step / SECOND
    origin = (start - intensity.times[0]) / SECOND
    lo, hi = origin, origin + edges_s[-1]
    first = int(math.floor(lo / step_s))
    last = int(math.ceil(hi / step_s))
    grid = np.arange(first, last + 1) * step_s
    cuts = np.union1d(grid[(grid > lo) & (grid < hi)], origin + edges_s)
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    dt_h = np.diff(cuts) / 3600.0
    i_idx = np.floor(mids / step_s).astype(int)
    p_idx = np.clip(np.searchsorted(edges_s, mids - origin, side="right") - 1, 0, len(kw) - 1)
    energy = kw[p_idx] * dt_h
    water = math.fsum(energy * intensity.wi[i_idx])
    carbon = math.fsum(energy * intensity.pue[i_idx] * intensity.ci[i_idx])
    return math.fsum(energy), water, carbon


def _rank(values: np.ndarray, starts: np.ndarray) -> list:
    scale = np.max(np.abs(values)) if len(values) else 0.0
    quantum = scale * TIE_RTOL if scale > 0 else 1.0
    keys = np.round(values / quantum)
    order = np.lexsort((starts.astype("int64"), keys))
    return [starts[i] for i in order]


def rank_start_times(candidates, duration_hours: float, power_profile, intensity: IntensitySeries) -> StartTimeRanking:
    """Rank candidate start times by integrated water and by integrated carbon.

    ``power_profile`` is a constant kW value or a :class:`TimeSeries` whose
    samples are read relative to the job start. Water integrates energy x WI;
    carbon integrates energy x PUE x CI. Totals within ``TIE_RTOL`` tie and
    ties go to the earlier start.
    """
    starts = as_times(candidates)
    if len(starts) == 0:
        raise ValidationError("no candidate start times")
    if duration_hours <= 0:
        raise ValidationError("duration must be positive")
    duration = np.timedelta64(int(round(duration_hours * 3600)), "s")
    edges_s, kw = _profile(power_profile, duration)
    rows = []
    for t in starts:
        if t < intensity.times[0] or t + duration > intensity.end:
            raise CoverageError(f"window {t} + {duration_hours} h is not covered by the intensity series")
        energy, water, carbon = _window_totals(intensity, t, edges_s, kw)
        rows.append((t, energy, water, carbon))
    table = pd.DataFrame(rows, columns=["start", "energy_kwh", "water_l", "carbon_g"])
    table["water_rank"] = 0
    table["carbon_rank"] = 0
    water_order = _rank(table["water_l"].to_numpy(), starts)
    carbon_order = _rank(table["carbon_g"].to_numpy(), starts)
    pos = {t: i for i, t in enumerate(starts)}
    for rank, t in enumerate(water_order, start=1):
        table.loc[pos[t], "water_rank"] = rank
    for rank, t in enumerate(carbon_order, start=1):
        table.loc[pos[t], "carbon_rank"] = rank
    return StartTimeRanking(table=table, water_ranking=water_order, carbon_ranking=carbon_order)


# -- embodied vs operational --------------------------------------------------


@dataclass(frozen=True, eq=False)
class RatioMapSpec:
    """Axes of manufacturing and operational WSI plus the fixed operating point.

    Operational water is ``energy_kwh * (wue + pue * ewf)``; embodied water
    comes from ``embodied_l`` or, when given, ``inventory``.
    """

    mfg_wsi_axis: Sequence[float]
    op_wsi_axis: Sequence[float]
    energy_kwh: float
    wue: float
    pue: float
    ewf: float
    embodied_l: Optional[float] = None
    inventory: Optional[HardwareInventory] = None

    def __post_init__(self):
        for name in ("mfg_wsi_axis", "op_wsi_axis"):
            axis = np.asarray(getattr(self, name), dtype=float)
            if axis.ndim != 1 or axis.size == 0:
                raise ValidationError(f"{name} must be a non-empty 1-D sequence")
            if np.any(axis <= 0) or np.any(np.diff(axis) <= 0):
                raise ValidationError(f"{name} must be positive and strictly increasing")
            object.__setattr__(self, name, axis)
        if self.embodied_l is None and self.inventory is None:
            raise ValidationError("ratio map needs embodied_l or an inventory")
        if self.pue < 1:
            raise ValidationError("PUE must be >= 1")

    @property
    def embodied(self) -> WaterVolume:
        if self.embodied_l is not None:
            return WaterVolume(self.embodied_l)
        return embodied_footprint(self.inventory).total

    @property
    def operational(self) -> WaterVolume:
        return WaterVolume(self.energy_kwh * (self.wue + self.pue * self.ewf))


@dataclass(frozen=True, eq=False)
class RatioMap:
    mfg_wsi: np.ndarray
    op_wsi: np.ndarray
    ratio: np.ndarray  # shape (len(op_wsi), len(mfg_wsi))
    contour: np.ndarray  # (k, 2) points (mfg_wsi, op_wsi) where the ratio is 1

    @property
    def embodied_dominant(self) -> np.ndarray:
        return self.ratio >= 1.0

    @property
    def embodied_dominant_fraction(self) -> float:
        return float(self.embodied_dominant.mean())


def embodied_operational_ratio_map(spec: RatioMapSpec) -> RatioMap:
    """Ratio of scarcity-weighted embodied to operational water on a WSI grid."""
    w_emb = spec.embodied.liters
    w_op = spec.operational.liters
    if w_op == 0:
        raise SingularityError("operational water footprint is zero; ratio undefined")
    m = spec.mfg_wsi_axis
    o = spec.op_wsi_axis
    ratio = (w_emb * m[None, :]) / (w_op * o[:, None])
    # unit contour: mfg WSI = op WSI * W_op / W_emb, kept inside the mfg axis
    if w_emb > 0:
        m_star = o * (w_op / w_emb)
        keep = (m_star >= m[0]) & (m_star <= m[-1])
        contour = np.column_stack([m_star[keep], o[keep]])
    else:
        contour = np.empty((0, 2))
    return RatioMap(mfg_wsi=m, op_wsi=o, ratio=ratio, contour=contour)


# -- water vs carbon ----------------------------------------------------------


def min_max(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    span = v.max() - v.min()
    if span == 0:
        return np.zeros_like(v)
    return (v - v.min()) / span


@dataclass(frozen=True, eq=False)
class SeriesComparison:
    monthly: pd.DataFrame
    normalized: pd.DataFrame
    rank_correlation: float
    method: str = "spearman"


def _as_frame_series(series, name: str) -> pd.Series:
    if isinstance(series, pd.Series):
        return series.rename(name)
    if isinstance(series, TimeSeries):
        return pd.Series(series.values, index=pd.DatetimeIndex(series.times), name=name)
    raise ValidationError(f"{name}: expected a TimeSeries or pandas Series")


def compare_series(wi_series, ci_series) -> SeriesComparison:
    """Monthly means, min-max normalized traces and Spearman correlation of WI vs CI."""
    wi = _as_frame_series(wi_series, "wi")
    ci = _as_frame_series(ci_series, "ci")
    joined = pd.concat([wi, ci], axis=1, join="inner").dropna()
    if joined.empty:
        raise AlignmentError("water and carbon intensity series do not overlap")
    monthly = joined.groupby(joined.index.to_period("M")).mean()
    normalized = pd.DataFrame({c: min_max(joined[c]) for c in joined.columns}, index=joined.index)
    if len(joined) < 2 or joined["wi"].nunique() < 2 or joined["ci"].nunique() < 2:
        rho = float("nan")
    else:
        rho = float(stats.spearmanr(joined["wi"], joined["ci"]).statistic)
    return SeriesComparison(monthly=monthly, normalized=normalized, rank_correlation=rho)


def monthly_profile(intensity: IntensitySeries) -> pd.DataFrame:
    """Monthly means of every intensity column (WUE, EWF, WI split, CI)."""
    frame = intensity.to_frame()
    return frame.groupby(frame.index.to_period("M")).mean()


def intensity_columns(intensity: IntensitySeries):
    """(wi, ci) of an intensity series as :class:`TimeSeries`, for :func:`compare_series`."""
    return (
        TimeSeries(intensity.times, intensity.wi, intensity.step),
        TimeSeries(intensity.times, intensity.ci, intensity.step),
    )
