"""Loading parameter databases, time series, job logs and WSI tables.

File formats
------------
Energy mix CSV   ``timestamp,source,share`` (long format, one row per source)
Weather CSV      ``timestamp,air_temp_c,rel_humidity_pct``
Power CSV        ``timestamp,power_kw``
Job log CSV      ``job_id,start,end,nodes``
WSI table CSV    ``region,wsi``

Series files may start with a ``# step=<duration>`` line (e.g. ``# step=1h``);
otherwise the step is the smallest spacing between timestamps. Timestamps
are ISO 8601; naive values are taken as UTC.

The parameter database is JSON (canonical) or YAML with the sections
``process_params``, ``source_factors``, ``wsi``, ``wue_curves``,
``withdrawal``, ``sites`` and optionally ``scenarios``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import yaml

from .core import ANY_SITE, DeviceSpec, HardwareInventory, ProcessParams
from .errors import (
    DataIOError,
    ParameterResolutionError,
    ParseError,
    RangeViolation,
    ValidationError,
    WaterModelError,
)
from .operational import EnergyMixSeries, PowerTrace, SourceFactors, WeatherSeries, WueCurve
from .scarcity import GridSupplyShare, ScarcityIndex, effective_indirect_wsi
from .timeseries import SECOND, TimeSeries, as_step, as_time
from .withdrawal import WithdrawalParams

PARAMS_ENV_VAR = "THIRSTY_PARAMS"

SERIES_HEADERS = {
    "energy_mix": ("timestamp", "source", "share"),
    "weather": ("timestamp", "air_temp_c", "rel_humidity_pct"),
    "power": ("timestamp", "power_kw"),
}
JOB_LOG_HEADER = ("job_id", "start", "end", "nodes")
WSI_HEADER = ("region", "wsi")

# multiplier taking each accepted area basis to liters per cm²
AREA_BASES = {"L/cm2": 1.0, "L/mm2": 100.0}


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc


# -- parameter database -------------------------------------------------------


@dataclass(frozen=True)
class SiteProfile:
    """Facility bundle: PUE, scarcity regions, WUE curve and withdrawal entry.

    The indirect scarcity is either a single region or a list of grid
    supplies ``{"grid_region": ..., "share": ...}``.
    """

    name: str
    pue: float
    wsi_direct: Optional[str] = None
    wsi_indirect: Optional[str] = None
    grid_supply: tuple = ()
    wue_curve: str = "default"
    withdrawal: str = "default"
    region: str = ""

    def __post_init__(self):
        if not math.isfinite(self.pue) or self.pue < 1.0:
            raise RangeViolation(f"site {self.name!r}: PUE {self.pue} must be >= 1")
        object.__setattr__(self, "grid_supply", tuple(dict(g) for g in self.grid_supply))


@dataclass(frozen=True, eq=False)
class ParameterDB:
    process_params: Mapping = field(default_factory=dict)
    source_factors: Mapping[str, SourceFactors] = field(default_factory=dict)
    wsi: Mapping[str, ScarcityIndex] = field(default_factory=dict)
    wue_curves: Mapping[str, WueCurve] = field(default_factory=dict)
    withdrawal: Mapping[str, WithdrawalParams] = field(default_factory=dict)
    sites: Mapping[str, SiteProfile] = field(default_factory=dict)
    scenarios: tuple = ()
    meta: Mapping = field(default_factory=dict)
    digest: str = ""
    path: Optional[str] = None

    def site(self, name: str) -> SiteProfile:
        try:
            return self.sites[name]
        except KeyError:
            raise ParameterResolutionError(f"unknown site {name!r} (known: {sorted(self.sites)})") from None

    def curve(self, name: str) -> WueCurve:
        try:
            return self.wue_curves[name]
        except KeyError:
            raise ParameterResolutionError(f"unknown WUE curve {name!r}") from None

    def wsi_value(self, region: str) -> float:
        try:
            return self.wsi[region].wsi
        except KeyError:
            raise ParameterResolutionError(f"no WSI for region {region!r}") from None

    def site_wsi(self, site) -> tuple[float, float]:
        """(direct, indirect) WSI of a site or site name; multi-grid supplies are share-averaged."""
        if isinstance(site, str):
            site = self.site(site)
        if site.wsi_direct is None:
            raise ParameterResolutionError(f"site {site.name!r} has no direct WSI region")
        direct = self.wsi_value(site.wsi_direct)
        if site.grid_supply:
            supplies = [
                GridSupplyShare(g["grid_region"], float(g["share"]), ScarcityIndex(g["grid_region"], self.wsi_value(g["grid_region"])))
                for g in site.grid_supply
            ]
            indirect = effective_indirect_wsi(supplies)
        elif site.wsi_indirect is not None:
            indirect = self.wsi_value(site.wsi_indirect)
        else:
            indirect = direct
        return direct, indirect

    def withdrawal_params(self, name: str) -> WithdrawalParams:
        try:
            return self.withdrawal[name]
        except KeyError:
            raise ParameterResolutionError(f"unknown withdrawal entry {name!r}") from None


def _parse_tree(text: str, source: str) -> dict:
    if not text.strip():
        raise ParseError(f"{source}: file is empty")
    if source.endswith(".json") or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
            raise ParseError(f"{source}: {where}{getattr(exc, 'problem', exc)}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be a mapping of sections")
    return data


def _section_entry(section: str, key, build):
    try:
        return build()
    except WaterModelError as exc:
        raise type(exc)(f"{section}[{key}]: {exc}") from exc
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"{section}[{key}]: {exc}") from exc


def _process_params(entry: dict, scale: float) -> ProcessParams:
    entry = dict(entry)
    node = entry.pop("node", None)
    site = entry.pop("site", ANY_SITE)
    for attr in ("upw", "pcw", "wpa"):
        if attr in entry:
            entry[attr] = float(entry[attr]) * scale
    known = {"w_ic", "upw", "pcw", "wpa", "wpc_dram", "wpc_ssd", "wpc_hdd"}
    unknown = set(entry) - known
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}")
    return ProcessParams(site=str(site), node=None if node is None else float(node), **{k: float(v) for k, v in entry.items()})


def _withdrawal(entry: dict) -> WithdrawalParams:
    entry = dict(entry)
    discharge = float(entry.pop("discharge_actual_l", entry.pop("discharge_actual", 0.0)))
    return WithdrawalParams(discharge_actual=discharge, **{k: float(v) for k, v in entry.items()})


def parse_parameter_db(data: dict, *, digest: str = "", path: Optional[str] = None) -> ParameterDB:
    """Validate a parsed parameter tree into a :class:`ParameterDB`."""
    meta = dict(data.get("meta") or {})
    basis = meta.get("area_basis", "L/cm2")
    if basis not in AREA_BASES:
        raise ParseError(f"meta.area_basis must be one of {sorted(AREA_BASES)}, got {basis!r}")
    scale = AREA_BASES[basis]

    process = {}
    for i, entry in enumerate(data.get("process_params") or []):
        params = _section_entry("process_params", i, lambda: _process_params(entry, scale))
        key = (params.node, params.site)
        if key in process:
            raise ValidationError(f"process_params[{i}]: duplicate entry for node={params.node}, site={params.site!r}")
        process[key] = params

    factors = {}
    for name, entry in (data.get("source_factors") or {}).items():
        factors[name] = _section_entry(
            "source_factors",
            name,
            lambda: SourceFactors(
                source=name,
                ewf=float(entry["ewf"]),
                carbon_intensity=float(entry["carbon_intensity"]),
                cooling=entry.get("cooling"),
            ),
        )

    wsi = {
        region: _section_entry("wsi", region, lambda: ScarcityIndex(region, float(value)))
        for region, value in (data.get("wsi") or {}).items()
    }

    curves = {}
    for name, knots in (data.get("wue_curves") or {}).items():
        curve = _section_entry("wue_curves", name, lambda: WueCurve(tuple(tuple(k) for k in knots), name=name))
        if not curve.knots:
            raise ValidationError(f"wue_curves[{name}]: curve has no knots")
        curves[name] = curve

    withdrawal = {
        name: _section_entry("withdrawal", name, lambda: _withdrawal(entry))
        for name, entry in (data.get("withdrawal") or {"default": {}}).items()
    }

    sites = {}
    for name, entry in (data.get("sites") or {}).items():
        sites[name] = _section_entry("sites", name, lambda: SiteProfile(name=name, **{**entry, "pue": float(entry["pue"])}))

    db = ParameterDB(
        process_params=process,
        source_factors=factors,
        wsi=wsi,
        wue_curves=curves,
        withdrawal=withdrawal,
        sites=sites,
        scenarios=tuple(data.get("scenarios") or ()),
        meta=meta,
        digest=digest,
        path=path,
    )
    for site in sites.values():
        _section_entry("sites", site.name, lambda: (db.curve(site.wue_curve), db.withdrawal_params(site.withdrawal)))
        if site.wsi_direct is not None:
            _section_entry("sites", site.name, lambda: db.site_wsi(site))
    return db


def load_parameter_db(path) -> ParameterDB:
    """Load and validate a parameter database (JSON or YAML)."""
    text = _read_text(path)
    data = _parse_tree(text, str(path))
    return parse_parameter_db(data, digest=hashlib.sha256(text.encode()).hexdigest(), path=str(path))


def default_params_path() -> Path:
    return Path(str(resources.files("hpcwater") / "data" / "default_params.json"))


def load_default_parameter_db() -> ParameterDB:
    return load_parameter_db(default_params_path())


def load_scenarios(path) -> list[dict]:
    """``scenarios`` section of a structured file (same format as the parameter DB)."""
    data = _parse_tree(_read_text(path), str(path))
    scenarios = data.get("scenarios")
    if not isinstance(scenarios, list) or not scenarios:
        raise ParseError(f"{path}: expected a non-empty 'scenarios' list")
    return scenarios


def load_inventory(path, db: ParameterDB) -> HardwareInventory:
    """Hardware inventory file: ``system_name`` plus a ``devices`` list."""
    data = _parse_tree(_read_text(path), str(path))
    devices = []
    for i, entry in enumerate(data.get("devices") or []):
        entry = dict(entry)
        for key in ("count", "n_ic"):
            if key in entry:
                entry[key] = int(entry[key])
        devices.append(_section_entry("devices", entry.get("name", i), lambda: DeviceSpec(**entry)))
    return HardwareInventory(
        system_name=str(data.get("system_name", Path(path).stem)),
        devices=tuple(devices),
        params_by_node_and_site=db.process_params,
    )


# -- CSV series ---------------------------------------------------------------


def _csv_rows(path, header: tuple):
    """Yield (line number, row) after checking the header; returns declared step."""
    text = _read_text(path)
    lines = text.splitlines()
    step = None
    body_start = 0
    while body_start < len(lines) and lines[body_start].startswith("#"):
        comment = lines[body_start].lstrip("#").strip()
        if comment.startswith("step="):
            try:
                step = as_step(comment.split("=", 1)[1].strip())
            except (ValueError, ValidationError) as exc:
                raise ParseError(f"{path}: line {body_start + 1}: bad step declaration {comment!r}") from exc
        body_start += 1
    reader = csv.reader(io.StringIO("\n".join(lines[body_start:])))
    try:
        got = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise ParseError(f"{path}: file is empty") from None
    if got != header:
        raise ParseError(f"{path}: line {body_start + 1}: expected header {','.join(header)}, got {','.join(got)}")
    rows = []
    for offset, row in enumerate(reader, start=body_start + 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}: line {offset}: expected {len(header)} fields, got {len(row)}")
        rows.append((offset, [c.strip() for c in row]))
    return rows, step


def _ts(text: str, path, line: int) -> np.datetime64:
    try:
        return as_time(text)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{path}: line {line}: bad timestamp {text!r}") from exc


def _num(text: str, path, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{path}: line {line}: {column} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{path}: line {line}: {column} must be finite")
    return value


def _infer_step(times: np.ndarray, path) -> np.timedelta64:
    if len(times) < 2:
        raise ParseError(f"{path}: cannot infer the step from fewer than two samples; add a '# step=' line")
    diffs = np.diff(times)
    positive = diffs[diffs > np.timedelta64(0, "s")]
    if positive.size == 0:
        raise ValidationError(f"{path}: timestamps are not increasing")
    return positive.min()


def _wrap(path, build):
    try:
        return build()
    except ValidationError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def load_series(path, kind: str, *, step=None, known_sources=None):
    """Read an ``energy_mix``, ``weather`` or ``power`` CSV into a series object."""
    if kind not in SERIES_HEADERS:
        raise ValidationError(f"unknown series kind {kind!r} (expected one of {sorted(SERIES_HEADERS)})")
    rows, declared = _csv_rows(path, SERIES_HEADERS[kind])
    if not rows:
        raise ParseError(f"{path}: no data rows")
    step = as_step(step) if step is not None else declared

    if kind == "energy_mix":
        shares: dict = {}
        order = []
        for line, (ts, source, share) in rows:
            t = _ts(ts, path, line)
            if known_sources is not None and source not in known_sources:
                raise ParameterResolutionError(f"{path}: line {line}: unknown energy source {source!r}")
            if t not in shares:
                if order and t < order[-1]:
                    raise ValidationError(f"{path}: line {line}: timestamp {t} is out of order")
                shares[t] = {}
                order.append(t)
            if source in shares[t]:
                raise ValidationError(f"{path}: line {line}: duplicate row for ({t}, {source})")
            shares[t][source] = _num(share, path, line, "share")
        times = np.array(order, dtype="datetime64[s]")
        sources = tuple(dict.fromkeys(s for row in shares.values() for s in row))
        matrix = np.array([[shares[t].get(s, 0.0) for s in sources] for t in order])
        step = step if step is not None else _infer_step(times, path)
        return _wrap(path, lambda: EnergyMixSeries(times, sources, matrix, step))

    times = np.array([_ts(r[0], path, line) for line, r in rows], dtype="datetime64[s]")
    dup = np.nonzero(np.diff(times) == np.timedelta64(0, "s"))[0]
    if dup.size:
        raise ValidationError(f"{path}: line {rows[dup[0] + 1][0]}: duplicated timestamp {times[dup[0]]}")
    step = step if step is not None else _infer_step(times, path)
    if kind == "weather":
        temp = [_num(r[1], path, line, "air_temp_c") for line, r in rows]
        rh = [_num(r[2], path, line, "rel_humidity_pct") for line, r in rows]
        return _wrap(path, lambda: WeatherSeries(times, temp, rh, step))
    power = [_num(r[1], path, line, "power_kw") for line, r in rows]
    return _wrap(path, lambda: PowerTrace(times, power, step))


def format_timestamp(t: np.datetime64) -> str:
    return f"{np.datetime_as_string(t.astype('datetime64[s]'), unit='s')}Z"


def format_step(step: np.timedelta64) -> str:
    return f"{int(step / SECOND)}s"


def serialize_series(series) -> str:
    """Canonical CSV rendering; :func:`load_series` reads it back bit-exactly."""
    out = io.StringIO()
    out.write(f"# step={format_step(series.step)}\n")
    writer = csv.writer(out, lineterminator="\n")
    if isinstance(series, EnergyMixSeries):
        writer.writerow(SERIES_HEADERS["energy_mix"])
        for t, row in zip(series.times, series.shares):
            for source, share in zip(series.sources, row):
                writer.writerow([format_timestamp(t), source, repr(float(share))])
    elif isinstance(series, WeatherSeries):
        writer.writerow(SERIES_HEADERS["weather"])
        for t, temp, rh in zip(series.times, series.air_temp, series.rel_humidity):
            writer.writerow([format_timestamp(t), repr(float(temp)), repr(float(rh))])
    elif isinstance(series, TimeSeries):
        writer.writerow(SERIES_HEADERS["power"])
        for t, p in zip(series.times, series.values):
            writer.writerow([format_timestamp(t), repr(float(p))])
    else:
        raise ValidationError(f"cannot serialize {type(series).__name__}")
    return out.getvalue()


def write_series(series, path) -> None:
    try:
        Path(path).write_text(serialize_series(series), encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc


def load_wsi_table(path) -> dict[str, ScarcityIndex]:
    rows, _ = _csv_rows(path, WSI_HEADER)
    table = {}
    for line, (region, value) in rows:
        if region in table:
            raise ValidationError(f"{path}: line {line}: duplicate region {region!r}")
        table[region] = _wrap(f"{path}: line {line}", lambda: ScarcityIndex(region, _num(value, path, line, "wsi")))
    return table


# -- job logs and power estimation ------------------------------------------


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    start: np.datetime64
    end: np.datetime64
    nodes_used: int

    def __post_init__(self):
        object.__setattr__(self, "start", as_time(self.start))
        object.__setattr__(self, "end", as_time(self.end))
        if self.end <= self.start:
            raise ValidationError(f"job {self.job_id!r}: end must be after start")
        if int(self.nodes_used) != self.nodes_used or self.nodes_used < 1:
            raise ValidationError(f"job {self.job_id!r}: nodes_used must be a positive integer")


@dataclass(frozen=True)
class NodePowerModel:
    """Per-node TDP in kW; idle nodes draw ``idle_fraction`` of it."""

    tdp_per_node: float
    idle_fraction: float = 0.0

    def __post_init__(self):
        if not (self.tdp_per_node > 0 and math.isfinite(self.tdp_per_node)):
            raise ValidationError("tdp_per_node must be > 0 kW")
        if not (0.0 <= self.idle_fraction <= 1.0):
            raise ValidationError("idle_fraction must lie in [0, 1]")


def load_job_log(path) -> list[JobRecord]:
    rows, _ = _csv_rows(path, JOB_LOG_HEADER)
    jobs = []
    for line, (job_id, start, end, nodes) in rows:
        n = _num(nodes, path, line, "nodes")
        if n != int(n):
            raise ParseError(f"{path}: line {line}: nodes must be an integer")
        jobs.append(
            _wrap(f"{path}: line {line}", lambda: JobRecord(job_id, _ts(start, path, line), _ts(end, path, line), int(n)))
        )
    return jobs


def utilization_to_power(
    jobs,
    total_nodes: int,
    model: NodePowerModel,
    step,
    *,
    start=None,
    end=None,
) -> PowerTrace:
    """Estimate a power trace from node occupancy.

    Each job adds ``nodes * overlap / step`` busy nodes to every step it
    overlaps (time-weighted, not rounded). Power is busy nodes at TDP plus
    idle nodes at ``idle_fraction`` of TDP. The window defaults to the job
    span snapped outward to the step grid; job time outside the window is
    ignored.
    """
    step = as_step(step)
    jobs = list(jobs)
    if total_nodes < 1:
        raise ValidationError("total_nodes must be >= 1")
    for job in jobs:
        if job.nodes_used > total_nodes:
            raise ValidationError(f"job {job.job_id!r} uses {job.nodes_used} nodes, system has {total_nodes}")
    if start is None or end is None:
        if not jobs:
            raise ValidationError("an explicit start/end window is required when there are no jobs")
        epoch = np.datetime64(0, "s")
        lo = min(j.start for j in jobs)
        hi = max(j.end for j in jobs)
        start = as_time(start) if start is not None else lo - (lo - epoch) % step
        end = as_time(end) if end is not None else hi + (-(hi - epoch)) % step
    start, end = as_time(start), as_time(end)
    if end <= start:
        raise ValidationError("window end must be after start")
    n = int(-(-((end - start) // SECOND) // (step // SECOND)))
    edges = start + step * np.arange(n + 1)
    step_s = step / SECOND
    busy = np.zeros(n)
    for job in jobs:
        lo = max(job.start, start)
        hi = min(job.end, end)
        if hi <= lo:
            continue
        first = int((lo - start) // step)
        last = int(-(-((hi - start) // SECOND) // step_s))
        seg_lo = np.maximum(edges[first:last], lo)
        seg_hi = np.minimum(edges[first + 1 : last + 1], hi)
        overlap = (seg_hi - seg_lo) / SECOND
        busy[first:last] += job.nodes_used * np.clip(overlap, 0, None) / step_s
    if np.any(busy > total_nodes * (1 + 1e-12)):
        at = edges[int(np.argmax(busy > total_nodes * (1 + 1e-12)))]
        raise ValidationError(f"jobs occupy more than {total_nodes} nodes at {at}")
    busy = np.minimum(busy, total_nodes)
    power = busy * model.tdp_per_node + (total_nodes - busy) * model.idle_fraction * model.tdp_per_node
    return PowerTrace(edges[:-1], power, step)


def load_candidates(path) -> np.ndarray:
    """Start-time candidates: one ISO timestamp per line (``start`` header optional)."""
    out = []
    for line_no, raw in enumerate(_read_text(path).splitlines(), start=1):
        text = raw.strip()
        if not text or text.startswith("#") or text.lower() == "start":
            continue
        out.append(_ts(text.split(",")[0], path, line_no))
    if not out:
        raise ParseError(f"{path}: no candidate start times")
    return np.array(out, dtype="datetime64[s]")



__all__ = [
    "JobRecord",
    "NodePowerModel",
    "ParameterDB",
    "SiteProfile",
    "default_params_path",
    "file_digest",
    "load_candidates",
    "load_default_parameter_db",
    "load_inventory",
    "load_job_log",
    "load_parameter_db",
    "load_scenarios",
    "load_series",
    "load_wsi_table",
    "parse_parameter_db",
    "serialize_series",
    "utilization_to_power",
    "write_series",
]
