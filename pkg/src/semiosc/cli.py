"""Command-line runner: scenarios, sweeps, plots, diagnostics.

Commands
    simulate <config> -o <dir>     time series CSV + diagnostics JSON + SVG
    sweep <sweepfile> -o <dir>     one subdirectory per leg + aggregate CSV
    plot <csv> --kind <k> -o <f>   re-plot an existing time series
    diagnose <config> -o <dir>     heavy diagnostics (Lyapunov, order)

Exit codes: 0 success, 2 config error, 3 runtime abort, 4 I/O error.
CSV and SVG bytes are deterministic for a given config and package version.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    load_sweep,
    read_config_text,
    parse_scenario_text,
)
from .core import SemiquantumError, UsageError
from .diagnostics import (
    DiagnosticError,
    DiagnosticsReport,
    energy_drift,
    convergence_order,
    lyapunov_max,
    max_abs_discrepancy,
    max_abs_remainder,
    structure_count,
)
from .dynamics import (
    COLUMNS,
    ScenarioConfig,
    TimeSeriesRecord,
    Trajectory,
    integrate,
    scenario_with,
)
from .svgplot import Curve, render_line_plot

__all__ = [
    "RunManifest",
    "PLOT_KINDS",
    "write_timeseries_csv",
    "read_timeseries_csv",
    "emit_plot",
    "run_scenario",
    "run_sweep",
    "run_diagnose",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_IO = 4

PLOT_KINDS = ("number-overlay", "number-difference", "energy", "phase-A")


@dataclass(frozen=True)
class RunManifest:
    """What a command produced: config snapshot, artifact paths, outcome."""

    command: str
    config_source: str
    config: dict
    version: str
    status: str
    duration_seconds: float
    outputs: dict
    warnings: tuple[str, ...] = ()
    abort_time: float | None = None
    abort_reason: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _csv_digits() -> int:
    """CSV precision; SEMIOSC_CSV_DIGITS overrides the default 17 (debugging
    aid only: the round-trip and reproducibility guarantees assume 17)."""
    raw = os.environ.get("SEMIOSC_CSV_DIGITS")
    if raw is None:
        return 17
    digits = int(raw)
    if not (1 <= digits <= 17):
        raise UsageError(f"SEMIOSC_CSV_DIGITS must be in [1, 17], got {raw!r}")
    return digits


def write_timeseries_csv(records, path: str) -> None:
    """Fixed column order, 17 significant digits, LF newlines."""
    digits = _csv_digits()
    lines = [",".join(COLUMNS)]
    for r in records:
        lines.append(",".join(f"{v:.{digits}g}" for v in r.as_row()))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_timeseries_csv(path: str):
    """Load a time-series CSV produced by this package."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines:
        raise UsageError(f"{path}: empty time-series file")
    header = tuple(lines[0].split(","))
    if header != COLUMNS:
        raise UsageError(f"{path}: header does not match the time-series schema")
    records = []
    for ln in lines[1:]:
        vals = [float(tok) for tok in ln.split(",")]
        records.append(TimeSeriesRecord(*vals))
    return records


def emit_plot(records, kind: str, path: str) -> None:
    """Write one standalone SVG for the given records."""
    if not records:
        raise UsageError("no records to plot")
    if kind not in PLOT_KINDS:
        raise UsageError(f"unknown plot kind {kind!r}; choose from "
                         f"{', '.join(PLOT_KINDS)}")
    t = [r.t for r in records]
    annotations = []
    if kind == "number-overlay":
        curves = [Curve("N_ours", t, [r.N_ours for r in records]),
                  Curve("N_cdms", t, [r.N_cdms for r in records])]
        title, xlabel, ylabel = "Occupation number", "t", "N"
    elif kind == "number-difference":
        curves = [Curve("N_ours - N_cdms", t,
                        [r.N_ours - r.N_cdms for r in records])]
        title, xlabel, ylabel = "Occupation-number difference", "t", "dN"
    elif kind == "energy":
        curves = [Curve("Etot", t, [r.Etot for r in records])]
        title, xlabel, ylabel = "Total energy", "t", "Etot"
        if len(records) >= 2 and records[0].Etot != 0.0:
            annotations.append(
                f"relative Etot drift = {_fmt(energy_drift(records))}")
    else:  # phase-A
        curves = [Curve("trajectory", [r.A for r in records],
                        [r.Adot for r in records])]
        title, xlabel, ylabel = "Classical phase portrait", "A", "dA/dt"
    svg = render_line_plot(curves, title=title, xlabel=xlabel, ylabel=ylabel,
                           annotations=annotations, version=__version__)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _light_report(config: ScenarioConfig, traj: Trajectory,
                  report: DiagnosticsReport | None = None) -> dict:
    """Diagnostics JSON payload for one run (heavy fields may be None)."""
    recs = traj.records
    payload = {
        "version": __version__,
        "scenario": asdict(config),
        "status": traj.status,
        "abort_time": traj.abort_time,
        "abort_reason": traj.abort_reason,
        "energy_drift": None,
        "extrema_ours": None,
        "extrema_cdms": None,
        "max_abs_discrepancy": None,
        "max_abs_remainder": None,
        "lyapunov": None,
        "convergence_order": None,
        "discrepancy_power": None,
    }
    if len(recs) >= 2 and recs[0].Etot != 0.0:
        payload["energy_drift"] = energy_drift(recs)
    if len(recs) >= 3:
        payload["extrema_ours"] = structure_count([r.N_ours for r in recs])
        payload["extrema_cdms"] = structure_count([r.N_cdms for r in recs])
    if recs:
        payload["max_abs_discrepancy"] = max_abs_discrepancy(recs)
        payload["max_abs_remainder"] = max_abs_remainder(recs)
    if report is not None:
        payload.update({k: v for k, v in report.to_dict().items()
                        if v is not None})
    return payload


def _run_one(config: ScenarioConfig, source: str, outdir: str,
             command: str, report: DiagnosticsReport | None = None
             ) -> tuple[RunManifest, Trajectory]:
    start = time.perf_counter()
    os.makedirs(outdir, exist_ok=True)
    traj = integrate(config)
    csv_path = os.path.join(outdir, "timeseries.csv")
    write_timeseries_csv(traj.records, csv_path)
    report_path = os.path.join(outdir, "diagnostics.json")
    _write_json(_light_report(config, traj, report), report_path)
    outputs = {"timeseries_csv": csv_path, "diagnostics_json": report_path,
               "plots": [], "manifest": os.path.join(outdir, "manifest.json")}
    if traj.records:
        overlay = os.path.join(outdir, "number_overlay.svg")
        emit_plot(traj.records, "number-overlay", overlay)
        outputs["plots"].append(overlay)
    warnings = []
    if not traj.completed:
        warnings.append(f"run aborted at t={traj.abort_time}: {traj.abort_reason}")
    manifest = RunManifest(
        command=command, config_source=source, config=asdict(config),
        version=__version__, status=traj.status,
        duration_seconds=time.perf_counter() - start,
        outputs=outputs, warnings=tuple(warnings),
        abort_time=traj.abort_time, abort_reason=traj.abort_reason)
    _write_json(manifest.to_dict(), outputs["manifest"])
    return manifest, traj


def run_scenario(config_ref: str, output_dir: str) -> RunManifest:
    """simulate: integrate one scenario and write CSV, report, and overlay plot."""
    text, source = read_config_text(config_ref)
    config = parse_scenario_text(text, source=source)
    manifest, _ = _run_one(config, source, output_dir, "simulate")
    return manifest


def run_diagnose(config_ref: str, output_dir: str) -> RunManifest:
    """diagnose: like simulate plus Lyapunov and observed convergence order."""
    text, source = read_config_text(config_ref)
    config = parse_scenario_text(text, source=source)
    start = time.perf_counter()
    warnings = []
    lyap = None
    order = None
    try:
        lyap = lyapunov_max(config)
        if lyap.failed:
            warnings.append(f"lyapunov estimate flagged: {lyap.note}")
    except (SemiquantumError, DiagnosticError) as exc:
        warnings.append(f"lyapunov failed: {exc}")
    try:
        order = convergence_order(config, (config.dt, config.dt / 2.0,
                                           config.dt / 4.0))
    except (SemiquantumError, DiagnosticError) as exc:
        warnings.append(f"convergence order failed: {exc}")
    report = DiagnosticsReport(lyapunov=lyap, order=order)
    manifest, _ = _run_one(config, source, output_dir, "diagnose", report)
    manifest = replace(manifest,
                       duration_seconds=time.perf_counter() - start,
                       warnings=manifest.warnings + tuple(warnings))
    _write_json(manifest.to_dict(), manifest.outputs["manifest"])
    return manifest


def _sweep_value_config(base: ScenarioConfig, axis: str, value: float
                        ) -> ScenarioConfig:
    if axis == "e":
        return scenario_with(base, e=value)
    return replace(base, **{axis: value})


def run_sweep(sweep_path: str, output_dir: str) -> RunManifest:
    """sweep: run every leg, aggregate metrics, fit the discrepancy power.

    A failed leg is recorded and skipped; the aggregate marks it and the
    command still exits 0 (with warnings in the manifest).
    """
    start = time.perf_counter()
    spec, base = load_sweep(sweep_path)
    os.makedirs(output_dir, exist_ok=True)
    rows = []
    warnings = []
    leg_outputs = []
    completed_values = []
    completed_amps = []
    for i, value in enumerate(spec.values):
        legdir = os.path.join(output_dir, f"leg{i:02d}")
        config = _sweep_value_config(base, spec.axis, value)
        manifest, traj = _run_one(config, f"{sweep_path}[{spec.axis}={value}]",
                                  legdir, "sweep-leg")
        leg_outputs.append(manifest.outputs)
        recs = traj.records
        row = {
            "leg": i, "axis": spec.axis, "value": value, "status": traj.status,
            "max_abs_discrepancy": max_abs_discrepancy(recs) if recs else math.nan,
            "max_abs_remainder": max_abs_remainder(recs) if recs else math.nan,
            "energy_drift": (energy_drift(recs)
                             if len(recs) >= 2 and recs[0].Etot != 0.0 else math.nan),
            "extrema_ours": (structure_count([r.N_ours for r in recs])
                             if len(recs) >= 3 else -1),
            "extrema_cdms": (structure_count([r.N_cdms for r in recs])
                             if len(recs) >= 3 else -1),
            "lyapunov": math.nan,
        }
        if traj.completed:
            lyap = lyapunov_max(config)
            row["lyapunov"] = lyap.value
            completed_values.append(value)
            completed_amps.append(row["max_abs_discrepancy"])
        else:
            warnings.append(f"leg {i} ({spec.axis}={value}) aborted: "
                            f"{traj.abort_reason}")
        rows.append(row)

    power = None
    note = ""
    if spec.axis != "e":
        note = f"no discrepancy power fit for axis {spec.axis!r}"
    elif len(completed_values) < 3:
        note = "insufficient legs for a power fit (need at least 3 completed)"
    elif all(a == 0.0 for a in completed_amps):
        note = "zero signal: no measurable discrepancy, fit rejected"
    elif any(a <= 0.0 for a in completed_amps) or any(v <= 0.0
                                                      for v in completed_values):
        note = "mixed zero/nonzero discrepancy amplitudes; fit rejected"
    else:
        power = float(np.polyfit(np.log(completed_values),
                                 np.log(completed_amps), 1)[0])
    if note:
        warnings.append(note)

    agg_path = os.path.join(output_dir, "aggregate.csv")
    header = ("leg", "axis", "value", "status", "max_abs_discrepancy",
              "max_abs_remainder", "energy_drift", "lyapunov",
              "extrema_ours", "extrema_cdms")
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join([
            str(row["leg"]), row["axis"], _fmt(row["value"]), row["status"],
            _fmt(row["max_abs_discrepancy"]), _fmt(row["max_abs_remainder"]),
            _fmt(row["energy_drift"]), _fmt(row["lyapunov"]),
            str(row["extrema_ours"]), str(row["extrema_cdms"])]))
    with open(agg_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    outputs = {"aggregate_csv": agg_path, "legs": leg_outputs,
               "discrepancy_power": power,
               "manifest": os.path.join(output_dir, "manifest.json")}
    manifest = RunManifest(
        command="sweep", config_source=sweep_path,
        config={"base": asdict(base), "axis": spec.axis,
                "values": list(spec.values)},
        version=__version__,
        status="completed",
        duration_seconds=time.perf_counter() - start,
        outputs=outputs, warnings=tuple(warnings))
    _write_json(manifest.to_dict(), outputs["manifest"])
    return manifest


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiosc",
        description="Semiquantum oscillator simulator")
    parser.add_argument("--version", action="version",
                        version=f"semiosc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario config")
    p.add_argument("config", help="config file path or bundled scenario name")
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("sweep", help="run a parameter sweep file")
    p.add_argument("sweepfile", help="sweep file path")
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("plot", help="plot an existing time-series CSV")
    p.add_argument("csv", help="time-series CSV path")
    p.add_argument("--kind", required=True, choices=PLOT_KINDS)
    p.add_argument("-o", "--output", required=True, help="output SVG path")

    p = sub.add_parser("diagnose", help="run heavy diagnostics on a scenario")
    p.add_argument("config", help="config file path or bundled scenario name")
    p.add_argument("-o", "--output", required=True, help="output directory")
    return parser


def _fail(kind: str, detail: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "detail": detail}) + "\n")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            manifest = run_scenario(args.config, args.output)
            if manifest.status != "completed":
                _fail("runtime-abort",
                      f"{manifest.status} at t={manifest.abort_time}: "
                      f"{manifest.abort_reason}")
                return EXIT_ABORT
            return EXIT_OK
        if args.command == "diagnose":
            manifest = run_diagnose(args.config, args.output)
            if manifest.status != "completed":
                _fail("runtime-abort",
                      f"{manifest.status} at t={manifest.abort_time}: "
                      f"{manifest.abort_reason}")
                return EXIT_ABORT
            for w in manifest.warnings:
                sys.stderr.write(f"warning: {w}\n")
            return EXIT_OK
        if args.command == "sweep":
            manifest = run_sweep(args.sweepfile, args.output)
            for w in manifest.warnings:
                sys.stderr.write(f"warning: {w}\n")
            return EXIT_OK
        if args.command == "plot":
            records = read_timeseries_csv(args.csv)
            emit_plot(records, args.kind, args.output)
            return EXIT_OK
        raise UsageError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        _fail("config", str(exc))
        return EXIT_CONFIG
    except (FileNotFoundError, IsADirectoryError, PermissionError, OSError) as exc:
        _fail("io", str(exc))
        return EXIT_IO
    except (SemiquantumError, DiagnosticError) as exc:
        _fail("config", str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
