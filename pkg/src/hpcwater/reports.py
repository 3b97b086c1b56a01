"""JSON reports, run manifests and sidecar CSVs."""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .core import LITERS_PER_US_GALLON, WaterVolume
from .errors import DataIOError, ValidationError
from .ingestion import file_digest


def quantity(value, unit: str) -> dict:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return {"value": None, "unit": unit}
    return {"value": float(value), "unit": unit}


def volume(v, gallons: bool = False) -> dict:
    liters = v.liters if isinstance(v, WaterVolume) else float(v)
    out = quantity(liters, "L")
    if gallons:
        out["us_gallons"] = quantity(liters / LITERS_PER_US_GALLON, "gal")
    return out


def timestamp_text(t) -> str:
    return f"{np.datetime_as_string(np.datetime64(t, 's'), unit='s')}Z"


def build_manifest(command: str, flags: dict, inputs, params_db=None, *, reproducible: bool = False) -> dict:
    """Record what produced a report: inputs with digests, DB digest, version, flags."""
    entries = []
    for path in inputs:
        if path is None:
            continue
        try:
            digest = file_digest(path)
        except OSError as exc:
            raise DataIOError(f"cannot read {path}: {exc}") from exc
        entries.append({"path": str(path), "sha256": digest})
    manifest = {
        "engine": "hpcwater",
        "engine_version": __version__,
        "command": command,
        "flags": {k: v for k, v in sorted(flags.items())},
        "inputs": entries,
        "params_db": None if params_db is None else {"path": params_db.path, "sha256": params_db.digest},
    }
    if not reproducible:
        manifest["created_at"] = datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")
    return manifest


def schema() -> dict:
    text = (resources.files("hpcwater") / "data" / "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_report(report: dict) -> None:
    try:
        jsonschema.validate(report, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"report does not match schema at {where}: {exc.message}") from exc


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, out_dir, name: str) -> Path:
    validate_report(report)
    path = Path(out_dir) / f"{name}.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(report), encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc
    return path


def write_frame(frame, out_dir, name: str) -> Path:
    """Sidecar CSV; column names carry their units."""
    path = Path(out_dir) / f"{name}.csv"
    out = frame.copy()
    if hasattr(out.index, "tz") or out.index.dtype.kind == "M":
        out.index = [timestamp_text(t) for t in out.index.values]
        out.index.name = "timestamp"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        out.to_csv(path, float_format="%.12g", lineterminator="\n")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc
    return path
