"""Operational water: cooling (direct) and electricity generation (indirect).

Direct water is energy times WUE, where WUE follows the outside wet-bulb
temperature through a piecewise-linear curve. Indirect water is energy
times PUE times the mix-weighted energy water factor (EWF). Their sum per
kWh is the water intensity (WI).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import pandas as pd

from .core import WaterVolume
from .errors import (
    AlignmentError,
    ConfigurationError,
    DomainError,
    ParameterResolutionError,
    RangeViolation,
    ValidationError,
)
from .timeseries import (
    TimeSeries,
    as_step,
    as_time,
    as_times,
    check_times,
    forward_fill_index,
    overlap_grid,
    step_hours,
)

SHARE_TOLERANCE = 1e-6

WET_BULB_RH_RANGE = (5.0, 99.0)
WET_BULB_T_RANGE = (-20.0, 50.0)

MIN_WUE = 0.05
EWF_RANGE = (0.0, 20.0)
NUCLEAR_EWF_BY_COOLING = {"wet_tower": (2.2, 3.2), "once_through": (0.5, 1.5)}


# -- wet bulb ---------------------------------------------------------------


def wet_bulb_temperature(air_temp, rel_humidity, *, clamp: bool = False):
    """Wet-bulb temperature (°C) from air temperature (°C) and relative humidity (%).

    Uses Stull's (2011) empirical fit, valid for RH 5-99 % and T -20-50 °C.
    Outside that window a :class:`DomainError` is raised unless ``clamp`` is
    set, in which case inputs are clipped to the window first. Works on
    scalars and arrays.
    """
    t = np.asarray(air_temp, dtype=float)
    rh = np.asarray(rel_humidity, dtype=float)
    if clamp:
        t = np.clip(t, *WET_BULB_T_RANGE)
        rh = np.clip(rh, *WET_BULB_RH_RANGE)
    else:
        if np.any((rh < WET_BULB_RH_RANGE[0]) | (rh > WET_BULB_RH_RANGE[1]) | ~np.isfinite(rh)):
            raise DomainError(f"relative humidity outside the {WET_BULB_RH_RANGE} % validity window")
        if np.any((t < WET_BULB_T_RANGE[0]) | (t > WET_BULB_T_RANGE[1]) | ~np.isfinite(t)):
            raise DomainError(f"air temperature outside the {WET_BULB_T_RANGE} °C validity window")
    tw = (
        t * np.arctan(0.151977 * np.sqrt(rh + 8.313659))
        + np.arctan(t + rh)
        - np.arctan(rh - 1.676331)
        + 0.00391838 * rh**1.5 * np.arctan(0.023101 * rh)
        - 4.686035
    )
    return float(tw) if tw.ndim == 0 else tw


@dataclass(frozen=True)
class WeatherSample:
    timestamp: np.datetime64
    air_temp: float
    rel_humidity: float

    def __post_init__(self):
        object.__setattr__(self, "timestamp", as_time(self.timestamp))
        if not (0.0 <= self.rel_humidity <= 100.0):
            raise ValidationError(f"relative humidity must lie in [0, 100] %, got {self.rel_humidity}")
        if not (-60.0 <= self.air_temp <= 60.0):
            raise ValidationError(f"air temperature must lie in [-60, 60] °C, got {self.air_temp}")


@dataclass(frozen=True, eq=False)
class WeatherSeries:
    times: np.ndarray
    air_temp: np.ndarray
    rel_humidity: np.ndarray
    step: np.timedelta64

    def __post_init__(self):
        times = as_times(self.times)
        step = as_step(self.step)
        temp = np.asarray(self.air_temp, dtype=float).reshape(-1)
        rh = np.asarray(self.rel_humidity, dtype=float).reshape(-1)
        if not (times.shape == temp.shape == rh.shape):
            raise ValidationError("weather columns differ in length")
        if np.any((rh < 0) | (rh > 100) | ~np.isfinite(rh)):
            raise ValidationError("relative humidity must lie in [0, 100] %")
        if np.any((temp < -60) | (temp > 60) | ~np.isfinite(temp)):
            raise ValidationError("air temperature must lie in [-60, 60] °C")
        check_times(times, step)
        for name, value in (("times", times), ("air_temp", temp), ("rel_humidity", rh), ("step", step)):
            object.__setattr__(self, name, value)

    def __len__(self):
        return len(self.times)

    @classmethod
    def constant(cls, start, periods: int, step, air_temp: float, rel_humidity: float) -> "WeatherSeries":
        step = as_step(step)
        times = as_time(start) + step * np.arange(periods)
        return cls(times, np.full(periods, air_temp), np.full(periods, rel_humidity), step)


# -- WUE curve ----------------------------------------------------------------


@dataclass(frozen=True)
class WueCurve:
    """Piecewise-linear WUE (L/kWh) as a function of wet-bulb temperature (°C).

    Evaluation clamps to the endpoint values outside the knot range.
    """

    knots: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        knots = tuple((float(t), float(w)) for t, w in self.knots)
        object.__setattr__(self, "knots", knots)
        temps = [t for t, _ in knots]
        wues = [w for _, w in knots]
        if any(b <= a for a, b in zip(temps, temps[1:])):
            raise ValidationError(f"WUE curve {self.name!r}: knot temperatures must be strictly increasing")
        if any(w < MIN_WUE for w in wues):
            raise RangeViolation(f"WUE curve {self.name!r}: WUE must be >= {MIN_WUE} L/kWh")
        if any(b < a for a, b in zip(wues, wues[1:])):
            raise ValidationError(f"WUE curve {self.name!r}: WUE must be non-decreasing in temperature")

    @classmethod
    def constant(cls, wue: float) -> "WueCurve":
        return cls(((0.0, wue),), name="constant")

    def __call__(self, wet_bulb):
        if not self.knots:
            raise ConfigurationError(f"WUE curve {self.name!r} has no knots")
        xs, ys = zip(*self.knots)
        out = np.interp(np.asarray(wet_bulb, dtype=float), xs, ys)
        return float(out) if out.ndim == 0 else out


DEFAULT_WUE_CURVE = WueCurve(((0.0, 0.05), (10.0, 0.5), (20.0, 1.4), (30.0, 2.5)), name="default")


def wue_at(curve: WueCurve, weather: WeatherSample, *, clamp: bool = False) -> float:
    """WUE for the wet-bulb temperature implied by ``weather``."""
    if not curve.knots:
        raise ConfigurationError(f"WUE curve {curve.name!r} has no knots")
    return curve(wet_bulb_temperature(weather.air_temp, weather.rel_humidity, clamp=clamp))


# -- energy mix ---------------------------------------------------------------


@dataclass(frozen=True)
class SourceFactors:
    """Per-source water factor (L/kWh) and carbon intensity (gCO2-eq/kWh).

    Nuclear entries tagged with a ``cooling`` type must respect that cooling
    type's EWF range.
    """

    source: str
    ewf: float
    carbon_intensity: float
    cooling: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.ewf) or not (EWF_RANGE[0] <= self.ewf <= EWF_RANGE[1]):
            raise RangeViolation(f"source {self.source!r}: EWF {self.ewf} L/kWh outside [{EWF_RANGE[0]}, {EWF_RANGE[1]}]")
        if not math.isfinite(self.carbon_intensity) or self.carbon_intensity < 0:
            raise RangeViolation(f"source {self.source!r}: carbon intensity must be >= 0")
        if self.cooling is not None:
            if self.cooling not in NUCLEAR_EWF_BY_COOLING:
                raise ValidationError(
                    f"source {self.source!r}: unknown cooling type {self.cooling!r} "
                    f"(expected one of {sorted(NUCLEAR_EWF_BY_COOLING)})"
                )
            if "nuclear" in self.source.lower():
                lo, hi = NUCLEAR_EWF_BY_COOLING[self.cooling]
                if not (lo <= self.ewf <= hi):
                    raise RangeViolation(
                        f"source {self.source!r}: nuclear {self.cooling} EWF {self.ewf} L/kWh outside "
                        f"the allowed {lo}-{hi} L/kWh range"
                    )


@dataclass(frozen=True)
class EnergyMixSample:
    timestamp: Optional[np.datetime64]
    shares: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.timestamp is not None:
            object.__setattr__(self, "timestamp", as_time(self.timestamp))
        object.__setattr__(self, "shares", dict(self.shares))
        validate_shares(self.shares)


def validate_shares(shares: Mapping[str, float], what: str = "energy mix") -> None:
    if not shares:
        raise ValidationError(f"{what} has no shares")
    for source, share in shares.items():
        if not (0.0 <= share <= 1.0):
            raise ValidationError(f"{what}: share of {source!r} must lie in [0, 1], got {share}")
    total = math.fsum(shares.values())
    if abs(total - 1.0) > SHARE_TOLERANCE:
        raise ValidationError(f"{what}: shares sum to {total:.9g}, expected 1 within {SHARE_TOLERANCE}")


def _mix_weighted(mix, factors: Mapping[str, SourceFactors], attr: str) -> float:
    shares = mix.shares if isinstance(mix, EnergyMixSample) else dict(mix)
    validate_shares(shares)
    total = 0.0
    for source, share in shares.items():
        if source not in factors:
            raise ParameterResolutionError(f"unknown energy source {source!r}")
        total += share * getattr(factors[source], attr)
    return total


def ewf_of_mix(mix, factors: Mapping[str, SourceFactors]) -> float:
    """Share-weighted energy water factor of a mix, L/kWh."""
    return _mix_weighted(mix, factors, "ewf")


def carbon_intensity_of_mix(mix, factors: Mapping[str, SourceFactors]) -> float:
    """Share-weighted carbon intensity of a mix, gCO2-eq/kWh."""
    return _mix_weighted(mix, factors, "carbon_intensity")


@dataclass(frozen=True, eq=False)
class EnergyMixSeries:
    """Shares per source on a fixed-step grid; ``shares`` is (samples, sources)."""

    times: np.ndarray
    sources: tuple
    shares: np.ndarray
    step: np.timedelta64

    def __post_init__(self):
        times = as_times(self.times)
        step = as_step(self.step)
        sources = tuple(self.sources)
        shares = np.asarray(self.shares, dtype=float).reshape(len(times), len(sources))
        if len(set(sources)) != len(sources):
            raise ValidationError("duplicate energy source columns")
        if np.any((shares < 0) | (shares > 1) | ~np.isfinite(shares)):
            raise ValidationError("mix shares must lie in [0, 1]")
        sums = shares.sum(axis=1)
        bad = np.abs(sums - 1.0) > SHARE_TOLERANCE
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValidationError(f"mix shares at {times[i]} sum to {sums[i]:.9g}, expected 1 within {SHARE_TOLERANCE}")
        check_times(times, step)
        for name, value in (("times", times), ("sources", sources), ("shares", shares), ("step", step)):
            object.__setattr__(self, name, value)

    def __len__(self):
        return len(self.times)

    @classmethod
    def constant(cls, start, periods: int, step, shares: Mapping[str, float]) -> "EnergyMixSeries":
        step = as_step(step)
        times = as_time(start) + step * np.arange(periods)
        sources = tuple(shares)
        return cls(times, sources, np.tile([shares[s] for s in sources], (periods, 1)), step)

    def sample(self, i: int) -> EnergyMixSample:
        return EnergyMixSample(self.times[i], {s: float(v) for s, v in zip(self.sources, self.shares[i]) if v})

    def weighted(self, factors: Mapping[str, SourceFactors], attr: str) -> np.ndarray:
        missing = [s for s in self.sources if s not in factors]
        if missing:
            raise ParameterResolutionError(f"unknown energy source(s) {missing}")
        vec = np.array([getattr(factors[s], attr) for s in self.sources])
        return self.shares @ vec

    def with_shares(self, shares: Mapping[str, float]) -> "EnergyMixSeries":
        """Same timestamps, every sample replaced by ``shares``."""
        validate_shares(shares, "mix override")
        sources = tuple(shares)
        return EnergyMixSeries(self.times, sources, np.tile([shares[s] for s in sources], (len(self.times), 1)), self.step)


# -- water intensity ----------------------------------------------------------


@dataclass(frozen=True)
class WaterIntensity:
    wi: float
    wi_direct: float
    wi_indirect: float


def water_intensity(wue, pue, ewf) -> WaterIntensity:
    """Split water intensity: direct = WUE, indirect = PUE x EWF."""
    if np.any(np.asarray(pue) < 1.0):
        raise RangeViolation(f"PUE must be >= 1, got {pue}")
    wi_direct = wue
    wi_indirect = pue * ewf
    return WaterIntensity(wi=wi_direct + wi_indirect, wi_direct=wi_direct, wi_indirect=wi_indirect)


class PowerTrace(TimeSeries):
    """IT power draw in kW, each sample averaged over its step."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.values < 0):
            raise ValidationError("power must be >= 0 kW")

    @property
    def power_kw(self) -> np.ndarray:
        return self.values

    @property
    def energy_kwh(self) -> np.ndarray:
        return self.values * self.step_hours

    @classmethod
    def constant(cls, start, periods: int, step, power_kw: float) -> "PowerTrace":
        step = as_step(step)
        return cls(as_time(start) + step * np.arange(periods), np.full(periods, float(power_kw)), step)


@dataclass(frozen=True, eq=False)
class IntensitySeries:
    """Per-step WUE, EWF, PUE, water intensity split and carbon intensity on a regular grid."""

    times: np.ndarray
    step: np.timedelta64
    wue: np.ndarray
    ewf: np.ndarray
    pue: np.ndarray
    ci: np.ndarray
    wi_direct: np.ndarray = None
    wi_indirect: np.ndarray = None
    wi: np.ndarray = None

    def __post_init__(self):
        times = as_times(self.times)
        step = as_step(self.step)
        n = len(times)
        cols = {}
        for name in ("wue", "ewf", "pue", "ci"):
            col = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (n,)).copy()
            cols[name] = col
        check_times(times, step, regular=True)
        split = water_intensity(cols["wue"], cols["pue"], cols["ewf"])
        cols.update(wi_direct=np.asarray(split.wi_direct), wi_indirect=np.asarray(split.wi_indirect), wi=np.asarray(split.wi))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "step", step)
        for name, col in cols.items():
            col.flags.writeable = False
            object.__setattr__(self, name, col)

    def __len__(self):
        return len(self.times)

    @property
    def step_hours(self) -> float:
        return step_hours(self.step)

    @property
    def end(self) -> np.datetime64:
        return self.times[-1] + self.step

    def samples(self) -> list[dict]:
        return self.to_frame().reset_index().to_dict("records")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "wue": self.wue,
                "ewf": self.ewf,
                "pue": self.pue,
                "wi_direct": self.wi_direct,
                "wi_indirect": self.wi_indirect,
                "wi": self.wi,
                "ci": self.ci,
            },
            index=pd.DatetimeIndex(self.times, name="timestamp"),
        )

    def window(self, start, end) -> "IntensitySeries":
        mask = (self.times >= as_time(start)) & (self.times < as_time(end))
        return IntensitySeries(self.times[mask], self.step, self.wue[mask], self.ewf[mask], self.pue[mask], self.ci[mask])


def build_intensity_series(
    weather: WeatherSeries,
    mix: EnergyMixSeries,
    pue,
    curve: WueCurve,
    factors: Mapping[str, SourceFactors],
    *,
    clamp_weather: bool = False,
) -> IntensitySeries:
    """Combine weather, grid mix and PUE into a per-step intensity series.

    Inputs are forward-filled onto the finest common step over their shared
    window. ``pue`` is a scalar or a :class:`TimeSeries`.
    """
    series = [weather, mix]
    if isinstance(pue, TimeSeries):
        series.append(pue)
    elif float(pue) < 1.0:
        raise RangeViolation(f"PUE must be >= 1, got {pue}")
    step = min(s.step for s in series)
    grid = overlap_grid(series, step)

    wi_idx = forward_fill_index(weather.times, weather.step, grid, what="weather series")
    mx_idx = forward_fill_index(mix.times, mix.step, grid, what="energy mix series")
    wet_bulb = wet_bulb_temperature(weather.air_temp[wi_idx], weather.rel_humidity[wi_idx], clamp=clamp_weather)
    wue = np.atleast_1d(curve(wet_bulb))
    ewf = mix.weighted(factors, "ewf")[mx_idx]
    ci = mix.weighted(factors, "carbon_intensity")[mx_idx]
    if isinstance(pue, TimeSeries):
        pue_values = pue.values[forward_fill_index(pue.times, pue.step, grid, what="PUE series")]
    else:
        pue_values = np.full(len(grid), float(pue))
    return IntensitySeries(grid, step, wue, ewf, pue_values, ci)


# -- integration --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OperationalFootprint:
    direct: WaterVolume
    indirect: WaterVolume
    total: WaterVolume
    energy_kwh: float
    series: pd.DataFrame

    @property
    def direct_share(self) -> float:
        return self.direct.liters / self.total.liters if self.total.liters else 0.0

    @property
    def indirect_share(self) -> float:
        return self.indirect.liters / self.total.liters if self.total.liters else 0.0


def operational_footprint(power: PowerTrace, intensity: IntensitySeries) -> OperationalFootprint:
    """Integrate power against intensity with a zero-order hold per step.

    Direct water is sum(E_t * WUE_t), indirect is sum(E_t * PUE_t * EWF_t),
    over the window both series cover.
    """
    if power.step != intensity.step:
        raise AlignmentError(f"power step {power.step} differs from intensity step {intensity.step}")
    if len(power) == 0 or len(intensity) == 0:
        raise AlignmentError("empty power trace or intensity series")
    grid = overlap_grid([power, intensity], intensity.step, anchor=intensity.times[0])
    if (power.times[0] - intensity.times[0]) % intensity.step != np.timedelta64(0, "s"):
        raise AlignmentError("power trace and intensity series are on offset grids")
    p_idx = forward_fill_index(power.times, power.step, grid, what="power trace")
    i_idx = np.searchsorted(intensity.times, grid)
    energy = power.values[p_idx] * power.step_hours
    direct = energy * intensity.wi_direct[i_idx]
    indirect = energy * intensity.wi_indirect[i_idx]
    frame = pd.DataFrame(
        {
            "energy_kwh": energy,
            "direct_l": direct,
            "indirect_l": indirect,
            "total_l": direct + indirect,
            "wi": intensity.wi[i_idx],
            "ci": intensity.ci[i_idx],
            "carbon_g": energy * intensity.pue[i_idx] * intensity.ci[i_idx],
        },
        index=pd.DatetimeIndex(grid, name="timestamp"),
    )
    d = math.fsum(direct)
    ind = math.fsum(indirect)
    return OperationalFootprint(
        direct=WaterVolume(d),
        indirect=WaterVolume(ind),
        total=WaterVolume(d + ind),
        energy_kwh=math.fsum(energy),
        series=frame,
    )
