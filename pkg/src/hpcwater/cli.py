"""Command-line entry point: ``hpcwater <command> ...``.

Exit codes: 0 success, 2 input validation, 3 parameter resolution,
4 I/O, 5 series alignment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import analysis, embodied, ingestion, operational, scarcity
from .core import WaterVolume
from .errors import DataIOError, ParameterResolutionError, ParseError, ValidationError, WaterModelError
from .reports import (
    build_manifest,
    quantity,
    timestamp_text,
    validate_report,
    volume,
    write_frame,
    write_report,
)
from .timeseries import as_step, forward_fill_index, overlap_grid
from .withdrawal import withdrawal as compute_withdrawal

EXIT_OK = 0


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", default=argparse.SUPPRESS, help="parameter DB (JSON/YAML); default $THIRSTY_PARAMS or the shipped DB")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory for reports (default: .)")
    common.add_argument("--gallons", action="store_true", default=argparse.SUPPRESS, help="also render volumes in US gallons")
    common.add_argument("--wsi", choices=("none", "uniform", "split"), default=argparse.SUPPRESS, help="scarcity weighting")
    common.add_argument("--reproducible", action="store_true", default=argparse.SUPPRESS, help="omit the report timestamp")
    return common


def _operating_inputs(p: argparse.ArgumentParser, *, power: bool = True) -> None:
    p.add_argument("--site", required=True, help="site name in the parameter DB")
    p.add_argument("--weather", required=True, help="weather CSV")
    p.add_argument("--mix", required=True, help="energy mix CSV")
    p.add_argument("--clamp-weather", action="store_true", help="clip weather into the wet-bulb fit's validity window")
    p.add_argument("--pue", type=float, help="override the site PUE")
    if power:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--power", help="power CSV (kW)")
        src.add_argument("--jobs", help="job log CSV; power estimated from node occupancy")
        p.add_argument("--nodes", type=int, help="total nodes (with --jobs)")
        p.add_argument("--tdp-kw", type=float, help="TDP per node in kW (with --jobs)")
        p.add_argument("--idle-fraction", type=float, default=0.0, help="idle draw as a fraction of TDP")
        p.add_argument("--step", default="1h", help="power trace step for --jobs (default 1h)")


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="hpcwater", description="Water footprint modeling for HPC systems.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embodied", parents=[common], help="embodied water of a hardware inventory")
    p.add_argument("inventory", help="inventory file (JSON/YAML)")

    p = sub.add_parser("operate", parents=[common], help="direct and indirect operational water")
    _operating_inputs(p)

    p = sub.add_parser("scenario", parents=[common], help="energy-source substitution scenarios")
    _operating_inputs(p)
    p.add_argument("--scenarios", required=True, help="file with a 'scenarios' section")

    p = sub.add_parser("rank", parents=[common], help="rank job start times by water and carbon")
    _operating_inputs(p, power=False)
    p.add_argument("--candidates", required=True, help="file with one ISO start time per line")
    p.add_argument("--duration", type=float, required=True, help="job duration in hours")
    prof = p.add_mutually_exclusive_group(required=True)
    prof.add_argument("--profile-kw", type=float, help="constant job power in kW")
    prof.add_argument("--profile", help="power CSV giving the job's power shape from its start")

    p = sub.add_parser("withdraw", parents=[common], help="water withdrawal from consumption")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--consumption", help="operate report JSON whose total is the consumption")
    src.add_argument("--consumption-l", type=float, help="consumption in liters")
    p.add_argument("--withdrawal", default="default", help="withdrawal entry name in the parameter DB")
    p.add_argument("--withdrawal-file", help="JSON/YAML mapping of withdrawal parameters")

    p = sub.add_parser("ratio-map", parents=[common], help="embodied/operational ratio over a WSI grid")
    emb = p.add_mutually_exclusive_group(required=True)
    emb.add_argument("--inventory", help="inventory file")
    emb.add_argument("--embodied-l", type=float, help="embodied water in liters")
    p.add_argument("--energy-kwh", type=float, required=True)
    p.add_argument("--wue", type=float, required=True, help="L/kWh")
    p.add_argument("--ewf", type=float, required=True, help="L/kWh")
    p.add_argument("--pue", type=float, required=True)
    p.add_argument("--mfg-wsi", required=True, help="comma list, or start:stop:count (log-spaced)")
    p.add_argument("--op-wsi", required=True, help="comma list, or start:stop:count (log-spaced)")

    p = sub.add_parser("validate", parents=[common], help="validate the parameter DB and optional reports")
    p.add_argument("reports", nargs="*", help="report JSON files to check against the schema")
    return parser


def _opts(args) -> dict:
    return {
        "params": getattr(args, "params", None),
        "out": getattr(args, "out", "."),
        "gallons": getattr(args, "gallons", False),
        "wsi": getattr(args, "wsi", "none"),
        "reproducible": getattr(args, "reproducible", False),
    }


def _load_db(opts):
    path = opts["params"] or os.environ.get(ingestion.PARAMS_ENV_VAR)
    if path:
        return ingestion.load_parameter_db(path)
    return ingestion.load_default_parameter_db()


def _flags(args, opts) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("command",) and v is not None and k not in opts}
    flags.update({k: v for k, v in opts.items() if k not in ("params", "out")})
    return flags


def _report(args, opts, db, inputs, results) -> dict:
    return {
        "report": args.command,
        "manifest": build_manifest(args.command, _flags(args, opts), inputs, db, reproducible=opts["reproducible"]),
        "results": results,
    }


def _pct(x):
    return quantity(None if x is None else x, "%")


# -- commands -----------------------------------------------------------------


def cmd_embodied(args, opts, db):
    inventory = ingestion.load_inventory(args.inventory, db)
    breakdown = embodied.embodied_footprint(inventory)
    g = opts["gallons"]
    shares = breakdown.shares()
    results = {
        "system_name": inventory.system_name,
        "total": volume(breakdown.total, g),
        "packaging": volume(breakdown.packaging, g),
        "manufacturing": volume(breakdown.manufacturing, g),
        "per_kind": {
            kind.value: {
                "packaging": volume(part.packaging, g),
                "manufacturing": volume(part.manufacturing, g),
                "transport_disposal": volume(part.transport_disposal, g),
                "total": volume(part.total, g),
                "share": quantity(shares[kind] * 100.0, "%"),
            }
            for kind, part in breakdown.per_kind.items()
        },
    }
    if opts["wsi"] != "none":
        wsi_map = {region: idx.wsi for region, idx in db.wsi.items()}
        adjusted = scarcity.adjust_embodied(embodied.device_contributions(inventory), wsi_map)
        results["scarcity"] = {"mode": "fab_site", "adjusted_total": volume(adjusted, g)}
    report = _report(args, opts, db, [args.inventory], results)
    path = write_report(report, opts["out"], "embodied_report")
    return report, [path]


def _power_trace(args):
    if args.power:
        return ingestion.load_series(args.power, "power"), [args.power]
    if args.nodes is None or args.tdp_kw is None:
        raise ValidationError("--jobs requires --nodes and --tdp-kw")
    jobs = ingestion.load_job_log(args.jobs)
    model = ingestion.NodePowerModel(args.tdp_kw, args.idle_fraction)
    return ingestion.utilization_to_power(jobs, args.nodes, model, as_step(args.step)), [args.jobs]


def _intensity(args, db):
    site = db.site(args.site)
    weather = ingestion.load_series(args.weather, "weather")
    mix = ingestion.load_series(args.mix, "energy_mix", known_sources=db.source_factors)
    pue = args.pue if args.pue is not None else site.pue
    curve = db.curve(site.wue_curve)
    return site, weather, mix, pue, curve


def _align_power(power, intensity):
    """Resample power onto the intensity step when they differ (forward fill)."""
    if power.step == intensity.step:
        return power
    grid = overlap_grid([power], intensity.step, anchor=intensity.times[0])
    idx = forward_fill_index(power.times, power.step, grid, what="power trace")
    return operational.PowerTrace(grid, power.values[idx], intensity.step)


def cmd_operate(args, opts, db):
    site, weather, mix, pue, curve = _intensity(args, db)
    power, power_inputs = _power_trace(args)
    intensity = operational.build_intensity_series(weather, mix, pue, curve, db.source_factors, clamp_weather=args.clamp_weather)
    fp = operational.operational_footprint(_align_power(power, intensity), intensity)
    g = opts["gallons"]
    series = fp.series.join(intensity.to_frame()[["wue", "ewf", "pue", "wi_direct", "wi_indirect"]], how="left")
    results = {
        "site": site.name,
        "window": {
            "start": timestamp_text(series.index.values[0]),
            "end": timestamp_text(series.index.values[-1] + intensity.step),
            "step": quantity(intensity.step_hours, "h"),
            "steps": quantity(len(series), "steps"),
        },
        "energy": quantity(fp.energy_kwh, "kWh"),
        "direct": volume(fp.direct, g),
        "indirect": volume(fp.indirect, g),
        "total": volume(fp.total, g),
        "direct_share": quantity(fp.direct_share * 100.0, "%"),
        "indirect_share": quantity(fp.indirect_share * 100.0, "%"),
        "mean_wi": quantity(fp.total.liters / fp.energy_kwh if fp.energy_kwh else None, "L/kWh"),
        "carbon": quantity(float(series["carbon_g"].sum()), "gCO2-eq"),
    }
    wsi_mode = opts["wsi"]
    if wsi_mode != "none":
        wsi_direct, wsi_indirect = db.site_wsi(site)
        if wsi_mode == "uniform":
            d = fp.direct.liters * scarcity.check_wsi(wsi_direct)
            i = fp.indirect.liters * scarcity.check_wsi(wsi_direct)
            wsi_indirect = wsi_direct
        else:
            d = fp.direct.liters * scarcity.check_wsi(wsi_direct)
            i = fp.indirect.liters * scarcity.check_wsi(wsi_indirect)
        results["scarcity"] = {
            "mode": wsi_mode,
            "wsi_direct": quantity(wsi_direct, "WSI"),
            "wsi_indirect": quantity(wsi_indirect, "WSI"),
            "direct": volume(d, g),
            "indirect": volume(i, g),
            "total": volume(d + i, g),
        }
        series["wi_wsi"] = scarcity.adjusted_series(series["wi_direct"].to_numpy(), series["wi_indirect"].to_numpy(), "split", wsi_direct, wsi_indirect)
    columns = {
        "energy_kwh": "energy_kwh",
        "wue": "wue_l_per_kwh",
        "ewf": "ewf_l_per_kwh",
        "pue": "pue",
        "wi_direct": "wi_direct_l_per_kwh",
        "wi_indirect": "wi_indirect_l_per_kwh",
        "wi": "wi_l_per_kwh",
        "ci": "ci_g_per_kwh",
        "direct_l": "direct_l",
        "indirect_l": "indirect_l",
        "total_l": "total_l",
        "carbon_g": "carbon_g",
        "wi_wsi": "wi_wsi_l_per_kwh",
    }
    sidecar = series[[c for c in columns if c in series]].rename(columns=columns)
    csv_path = write_frame(sidecar, opts["out"], "operate_series")
    results["series_files"] = [csv_path.name]
    report = _report(args, opts, db, [args.weather, args.mix, *power_inputs], results)
    path = write_report(report, opts["out"], "operate_report")
    return report, [path, csv_path]


def cmd_scenario(args, opts, db):
    site, weather, mix, pue, curve = _intensity(args, db)
    power, power_inputs = _power_trace(args)
    scenarios = [analysis.Scenario.from_dict(s) for s in ingestion.load_scenarios(args.scenarios)]
    for s in scenarios:
        if not s.is_unchanged:
            missing = [src for src in s.mix_override if src not in db.source_factors]
            if missing:
                raise ParameterResolutionError(f"scenario {s.name!r}: unknown energy source(s) {missing}")
    probe = operational.build_intensity_series(weather, mix, pue, curve, db.source_factors, clamp_weather=args.clamp_weather)
    bundle = analysis.BaselineBundle(weather, mix, pue, curve, db.source_factors, _align_power(power, probe), args.clamp_weather)
    rows = analysis.run_scenarios(bundle, scenarios)
    g = opts["gallons"]
    results = {
        "site": site.name,
        "scenarios": [
            {
                "name": r.name,
                "water_direct": volume(r.water_direct, g),
                "water_indirect": volume(r.water_indirect, g),
                "water_total": volume(r.water_total, g),
                "carbon_total": quantity(r.carbon_total_g, "gCO2-eq"),
                "delta_water": _pct(r.delta_water_pct),
                "delta_direct": _pct(r.delta_direct_pct),
                "delta_indirect": _pct(r.delta_indirect_pct),
                "delta_carbon": _pct(r.delta_carbon_pct),
            }
            for r in rows
        ],
    }
    frame = pd.DataFrame(
        {
            "water_total_l": [r.water_total.liters for r in rows],
            "carbon_total_g": [r.carbon_total_g for r in rows],
            "delta_water_pct": [r.delta_water_pct for r in rows],
            "delta_carbon_pct": [r.delta_carbon_pct for r in rows],
        },
        index=pd.Index([r.name for r in rows], name="scenario"),
    )
    csv_path = write_frame(frame, opts["out"], "scenario_table")
    results["series_files"] = [csv_path.name]
    report = _report(args, opts, db, [args.weather, args.mix, *power_inputs, args.scenarios], results)
    path = write_report(report, opts["out"], "scenario_report")
    return report, [path, csv_path]


def cmd_rank(args, opts, db):
    site, weather, mix, pue, curve = _intensity(args, db)
    intensity = operational.build_intensity_series(weather, mix, pue, curve, db.source_factors, clamp_weather=args.clamp_weather)
    candidates = ingestion.load_candidates(args.candidates)
    profile = args.profile_kw if args.profile is None else ingestion.load_series(args.profile, "power")
    ranking = analysis.rank_start_times(candidates, args.duration, profile, intensity)
    g = opts["gallons"]
    results = {
        "site": site.name,
        "duration": quantity(args.duration, "h"),
        "candidates": [
            {
                "start": timestamp_text(row.start),
                "energy": quantity(row.energy_kwh, "kWh"),
                "water": volume(row.water_l, g),
                "carbon": quantity(row.carbon_g, "gCO2-eq"),
                "water_rank": quantity(int(row.water_rank), "rank"),
                "carbon_rank": quantity(int(row.carbon_rank), "rank"),
            }
            for row in ranking.table.itertuples()
        ],
        "water_ranking": [timestamp_text(t) for t in ranking.water_ranking],
        "carbon_ranking": [timestamp_text(t) for t in ranking.carbon_ranking],
        "best_for_water": timestamp_text(ranking.best_for_water),
        "best_for_carbon": timestamp_text(ranking.best_for_carbon),
    }
    inputs = [args.weather, args.mix, args.candidates] + ([args.profile] if args.profile else [])
    report = _report(args, opts, db, inputs, results)
    path = write_report(report, opts["out"], "rank_report")
    return report, [path]


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def cmd_withdraw(args, opts, db):
    inputs = []
    if args.consumption:
        source = _read_json(args.consumption)
        try:
            liters = float(source["results"]["total"]["value"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{args.consumption}: expected an operate report with results.total") from None
        inputs.append(args.consumption)
    else:
        liters = args.consumption_l
    consumption = WaterVolume(liters)
    if args.withdrawal_file:
        data = ingestion._parse_tree(ingestion._read_text(args.withdrawal_file), args.withdrawal_file)
        params = ingestion._section_entry("withdrawal", args.withdrawal_file, lambda: ingestion._withdrawal(data))
        inputs.append(args.withdrawal_file)
    else:
        params = db.withdrawal_params(args.withdrawal)
    w = compute_withdrawal(consumption, params)
    g = opts["gallons"]
    results = {
        "consumption": volume(consumption, g),
        "discharge_actual": volume(params.discharge_actual, g),
        "adjusted_discharge": volume(w.adjusted_discharge, g),
        "reuse": volume(w.reuse, g),
        "gross": volume(w.gross, g),
        "net": volume(w.net, g),
        "potable": volume(w.potable, g),
        "nonpotable": volume(w.nonpotable, g),
        "potable_weighted": volume(w.potable_weighted, g),
        "nonpotable_weighted": volume(w.nonpotable_weighted, g),
    }
    report = _report(args, opts, db, inputs, results)
    path = write_report(report, opts["out"], "withdraw_report")
    return report, [path]


def parse_axis(text: str) -> np.ndarray:
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return np.geomspace(float(start), float(stop), int(count))
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ValidationError(f"bad axis {text!r}; use a comma list or start:stop:count") from None


def cmd_ratio_map(args, opts, db):
    inventory = ingestion.load_inventory(args.inventory, db) if args.inventory else None
    spec = analysis.RatioMapSpec(
        mfg_wsi_axis=parse_axis(args.mfg_wsi),
        op_wsi_axis=parse_axis(args.op_wsi),
        energy_kwh=args.energy_kwh,
        wue=args.wue,
        pue=args.pue,
        ewf=args.ewf,
        embodied_l=args.embodied_l,
        inventory=inventory,
    )
    rmap = analysis.embodied_operational_ratio_map(spec)
    g = opts["gallons"]
    results = {
        "embodied": volume(spec.embodied, g),
        "operational": volume(spec.operational, g),
        "mfg_wsi_axis": {"values": [float(v) for v in rmap.mfg_wsi], "unit": "WSI"},
        "op_wsi_axis": {"values": [float(v) for v in rmap.op_wsi], "unit": "WSI"},
        "embodied_dominant_fraction": quantity(rmap.embodied_dominant_fraction * 100.0, "%"),
        "unit_contour": [{"mfg_wsi": quantity(m, "WSI"), "op_wsi": quantity(o, "WSI")} for m, o in rmap.contour],
    }
    frame = pd.DataFrame(rmap.ratio, index=pd.Index(rmap.op_wsi, name="op_wsi"), columns=[f"mfg_wsi={v:.6g}" for v in rmap.mfg_wsi])
    csv_path = write_frame(frame, opts["out"], "ratio_map")
    results["series_files"] = [csv_path.name]
    report = _report(args, opts, db, [args.inventory] if args.inventory else [], results)
    path = write_report(report, opts["out"], "ratio_map_report")
    return report, [path, csv_path]


def cmd_validate(args, opts, db):
    checked = []
    for path in args.reports:
        validate_report(_read_json(path))
        checked.append(path)
    results = {
        "params_db": {
            "process_params": quantity(len(db.process_params), "entries"),
            "source_factors": quantity(len(db.source_factors), "entries"),
            "wsi": quantity(len(db.wsi), "entries"),
            "wue_curves": quantity(len(db.wue_curves), "entries"),
            "withdrawal": quantity(len(db.withdrawal), "entries"),
            "sites": quantity(len(db.sites), "entries"),
        },
        "reports_valid": checked,
    }
    report = _report(args, opts, db, checked, results)
    validate_report(report)
    return report, []


COMMANDS = {
    "embodied": cmd_embodied,
    "operate": cmd_operate,
    "scenario": cmd_scenario,
    "rank": cmd_rank,
    "withdraw": cmd_withdraw,
    "ratio-map": cmd_ratio_map,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = _opts(args)
    try:
        db = _load_db(opts)
        report, written = COMMANDS[args.command](args, opts, db)
    except WaterModelError as exc:
        print(f"hpcwater {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"hpcwater {args.command}: error: {exc}", file=sys.stderr)
        return DataIOError.exit_code
    for path in written:
        print(path)
    if not written:
        print(f"ok: {args.command}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
