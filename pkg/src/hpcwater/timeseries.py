"""Fixed-step time series and grid alignment.

Timestamps are naive ``datetime64[s]`` values interpreted as UTC. A series
declares its step; samples sit on multiples of that step, gaps are allowed
and each sample holds its value over ``[t, t + step)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta

import numpy as np
import pandas as pd

from .errors import AlignmentError, ValidationError

MAX_FILL_STEPS = 6

SECOND = np.timedelta64(1, "s")


def as_times(values) -> np.ndarray:
    """Coerce timestamps (ISO strings, datetimes, datetime64) to UTC ``datetime64[s]``."""
    arr = np.atleast_1d(np.asarray(values))
    if arr.dtype.kind == "M":
        return arr.astype("datetime64[s]")
    if arr.size == 0:
        return np.array([], dtype="datetime64[s]")
    idx = pd.to_datetime(arr, utc=True)
    return idx.tz_convert(None).values.astype("datetime64[s]")


def as_time(value) -> np.datetime64:
    return as_times([value])[0]


def as_step(step) -> np.timedelta64:
    """Coerce a step (timedelta, seconds, ``"1h"``, timedelta64) to ``timedelta64[s]``."""
    if isinstance(step, np.timedelta64):
        out = step.astype("timedelta64[s]")
    elif isinstance(step, timedelta):
        out = np.timedelta64(int(step.total_seconds()), "s")
    elif isinstance(step, (int, float, np.integer, np.floating)):
        out = np.timedelta64(int(step), "s")
    else:
        out = np.timedelta64(int(pd.Timedelta(step).total_seconds()), "s")
    if out <= np.timedelta64(0, "s"):
        raise ValidationError(f"step must be positive, got {step!r}")
    return out


def step_hours(step: np.timedelta64) -> float:
    return (step / SECOND) / 3600.0


def check_times(times: np.ndarray, step: np.timedelta64, *, regular: bool = False) -> None:
    if times.size == 0:
        return
    diffs = np.diff(times)
    if np.any(diffs <= np.timedelta64(0, "s")):
        bad = int(np.argmax(diffs <= np.timedelta64(0, "s"))) + 1
        raise ValidationError(f"timestamps must be strictly increasing (row {bad}: {times[bad]})")
    if np.any(diffs % step != np.timedelta64(0, "s")):
        bad = int(np.argmax(diffs % step != np.timedelta64(0, "s"))) + 1
        raise ValidationError(f"timestamp {times[bad]} is off the declared {step} step grid")
    if regular and np.any(diffs != step):
        raise ValidationError("series must be gap-free at its declared step")


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Scalar values on a fixed-step grid."""

    times: np.ndarray
    values: np.ndarray
    step: np.timedelta64

    def __post_init__(self):
        times = as_times(self.times)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        step = as_step(self.step)
        if times.shape != values.shape:
            raise ValidationError(f"{len(times)} timestamps but {len(values)} values")
        if not np.all(np.isfinite(values)):
            raise ValidationError("series values must be finite")
        check_times(times, step)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "step", step)
        _freeze(times, values)

    def __len__(self):
        return len(self.times)

    @property
    def start(self) -> np.datetime64:
        return self.times[0]

    @property
    def end(self) -> np.datetime64:
        """End of coverage (exclusive)."""
        return self.times[-1] + self.step

    @property
    def step_hours(self) -> float:
        return step_hours(self.step)

    @property
    def is_regular(self) -> bool:
        return bool(np.all(np.diff(self.times) == self.step))

    def scaled(self, factor: float):
        return type(self)(self.times, self.values * factor, self.step)


def overlap_grid(series, step: np.timedelta64, anchor: np.datetime64 | None = None) -> np.ndarray:
    """Grid of ``step`` spacing covering the intersection of every series' span."""
    if any(len(s.times) == 0 for s in series):
        raise AlignmentError("cannot align an empty series")
    start = max(s.times[0] for s in series)
    end = min(s.times[-1] + s.step for s in series)
    if anchor is not None:
        offset = (start - anchor) % step
        if offset != np.timedelta64(0, "s"):
            start = start + (step - offset)
    if end <= start:
        raise AlignmentError(f"series do not overlap (latest start {start}, earliest end {end})")
    return np.arange(start, end, step)


def forward_fill_index(times: np.ndarray, step: np.timedelta64, grid: np.ndarray, *, what: str = "series") -> np.ndarray:
    """Index of the sample in effect at each grid instant.

    Raises :class:`AlignmentError` when a grid instant falls in a gap longer
    than ``MAX_FILL_STEPS`` missing samples, or before the first sample.
    """
    idx = np.searchsorted(times, grid, side="right") - 1
    if np.any(idx < 0):
        raise AlignmentError(f"{what} starts after {grid[int(np.argmax(idx < 0))]}")
    age = grid - times[idx]
    limit = step * (MAX_FILL_STEPS + 1)
    if np.any(age >= limit):
        at = grid[int(np.argmax(age >= limit))]
        raise AlignmentError(f"{what} has a gap longer than {MAX_FILL_STEPS} steps at {at}")
    return idx
