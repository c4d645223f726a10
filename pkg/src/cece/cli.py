"""Batch command-line front end.

Subcommands wire ingestion, estimation, survival curves, sensitivity sweeps,
simulation, and the oracle validation suite into reproducible runs.  Every
run writes a manifest (command line, input digests, seed, version,
timestamps, outputs); analysis outputs themselves carry no timestamps, so a
rerun with identical inputs is byte-identical.

Exit codes: 0 ok, 2 input error, 3 estimation precondition failed,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import yaml

from . import __version__, estimators, inference, sensitivity, simulator, survival, validation
from .data import (
    MODE_BINARY,
    MODE_TTE,
    ArmSummary,
    build_event_table,
    load_subject_table,
    summarize_arms,
    write_subject_table,
)
from .errors import EstimationError, InputError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ESTIMATION = 3
EXIT_VALIDATION = 4

MANIFEST_NAME = "run_manifest.json"


# --- output plumbing -----------------------------------------------------------

def _round_floats(obj):
    """Normalize every float to 12 significant digits for stable output."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return obj
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _format_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _atomic_write(path: Path, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class RunWriter:
    """Collects output files and finalizes the run manifest."""

    def __init__(self, out_dir: Path, args: argparse.Namespace):
        self.out_dir = out_dir
        self.args = args
        self.outputs: list[str] = []
        self.input_digests: dict[str, str] = {}
        self.started = datetime.now(timezone.utc).isoformat()
        out_dir.mkdir(parents=True, exist_ok=True)

    def record_input(self, path: str | Path) -> None:
        p = Path(path)
        self.input_digests[str(p)] = _sha256_file(p)

    def write_json(self, name: str, payload: dict) -> Path:
        payload = dict(payload)
        payload["manifest"] = MANIFEST_NAME
        text = json.dumps(_round_floats(payload), indent=2, allow_nan=True)
        path = self.out_dir / name
        _atomic_write(path, text + "\n")
        self.outputs.append(name)
        return path

    def write_csv(self, name: str, header: list[str], rows: list[list]) -> Path:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
        path = self.out_dir / name
        _atomic_write(path, buf.getvalue())
        self.outputs.append(name)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        _atomic_write(path, text)
        self.outputs.append(name)
        return path

    def finalize(self) -> None:
        manifest = {
            "command": [Path(sys.argv[0]).name] + sys.argv[1:],
            "inputs": self.input_digests,
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": {
                name: _sha256_file(self.out_dir / name) for name in self.outputs
            },
        }
        _atomic_write(
            self.out_dir / MANIFEST_NAME, json.dumps(manifest, indent=2) + "\n"
        )


# --- argument parsing ----------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--level", type=float, default=0.95,
                        help="two-sided confidence level (default 0.95)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed override for stochastic subcommands")
    parser.add_argument("--out-dir", default=".",
                        help="directory for output files (default: cwd)")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="primary report format where both make sense")


def _add_aggregate_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mu1", type=float, help="vaccine-arm mean outcome")
    parser.add_argument("--mu0", type=float, help="control-arm mean outcome")
    parser.add_argument("--n1", type=int, help="vaccine-arm size")
    parser.add_argument("--n0", type=int, help="control-arm size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cece",
        description="Exposure-conditional vaccine effects from trial data",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="point-exposure effect estimates")
    p.add_argument("--input", help="subject-level CSV")
    p.add_argument("--mode", default="point", choices=("point", "nonneg", "tte"),
                   help="analysis mode for --input (default point)")
    _add_aggregate_args(p)
    p.add_argument("--continuity-correction", action="store_true",
                   help="add 0.5 events / 1 subject per arm when an arm has none")
    p.add_argument("--ratio-method", choices=("log-delta", "fieller"),
                   default="log-delta")
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("survival", help="discrete-time incidence and effect curves")
    p.add_argument("--input", required=True, help="time-to-event subject CSV")
    p.add_argument("--interval-count", type=int, default=None,
                   help="number of follow-up intervals K (default: inferred)")
    _add_common(p)
    p.set_defaults(func=cmd_survival)

    p = sub.add_parser("sensitivity", help="absolute-effect sensitivity analysis")
    p.add_argument("--input", help="subject-level CSV (binary point mode)")
    _add_aggregate_args(p)
    p.add_argument("--p-exposure", type=float, default=None,
                   help="assumed control-arm exposure risk P(E=1|A=0)")
    p.add_argument("--p-outcome", type=float, default=None,
                   help="assumed control-arm outcome risk given exposure")
    p.add_argument("--grid", type=int, default=None,
                   help="sweep size over the feasible exposure-risk range")
    p.add_argument("--ci", action="store_true",
                   help="attach delta-method intervals (sampling error only)")
    _add_common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("simulate", help="draw a counterfactual cohort")
    p.add_argument("--config", required=True, help="simulation config (YAML)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run the oracle validation suite")
    p.add_argument("--config", default=None,
                   help="simulation config (YAML); default: built-in suite")
    p.add_argument("--n", type=int, default=100_000,
                   help="cohort size for the built-in suite (default 100000)")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    return parser


# --- subcommands -----------------------------------------------------------------

def _summary_from_args(args: argparse.Namespace, writer: RunWriter) -> ArmSummary:
    aggregates = [args.mu1, args.mu0, args.n1, args.n0]
    given = [v is not None for v in aggregates]
    if args.input and any(given):
        raise InputError("give either --input or aggregate --mu1/--mu0/--n1/--n0")
    if args.input:
        writer.record_input(args.input)
        mode = getattr(args, "mode", "point")
        if mode == "tte":
            raise InputError("time-to-event input: use the 'survival' subcommand")
        table = load_subject_table(args.input, mode)
        return summarize_arms(table)
    if all(given):
        return ArmSummary.from_aggregates(
            mu1=args.mu1, mu0=args.mu0, n1=args.n1, n0=args.n0
        )
    raise InputError(
        "missing input: give --input PATH or all of --mu1 --mu0 --n1 --n0"
    )


def _estimates_to_rows(entries: list[dict]) -> tuple[list[str], list[list]]:
    header = ["estimand", "point", "ci_lower", "ci_upper", "level", "method",
              "scale", "orientation_swapped"]
    rows = [
        [e["estimand"], e["point"], e["ci"][0], e["ci"][1], e["level"],
         e["method"], e["scale"], e["orientation_swapped"]]
        for e in entries
    ]
    return header, rows


def cmd_estimate(args: argparse.Namespace, writer: RunWriter) -> int:
    summary = _summary_from_args(args, writer)
    level = args.level
    method = (
        inference.FIELLER_RATIO
        if args.ratio_method == "fieller"
        else inference.LOG_DELTA_RATIO
    )
    n_per_arm = summary.n

    ate = estimators.estimate_ate(summary, level)
    rcece = estimators.estimate_relative_cece(
        summary, level, method=method,
        continuity_correction=args.continuity_correction,
    )
    excess = estimators.estimate_excess_fraction(
        summary, level, continuity_correction=args.continuity_correction
    )
    report = {
        "ate": ate.to_json_dict(n_per_arm),
        "relative_cece": rcece.to_json_dict(n_per_arm),
        "excess_fraction": excess.to_json_dict(n_per_arm),
    }
    if summary.mode == MODE_BINARY:
        bounds = estimators.bound_absolute_cece(summary, level)
        report["acece_lower"] = bounds.lower.to_json_dict(
            n_per_arm, bounds.orientation_swapped
        )
        report["acece_upper"] = bounds.upper.to_json_dict(
            n_per_arm, bounds.orientation_swapped
        )
    if summary.strata:
        report["conditional_cde"] = {
            code: estimators.estimate_conditional_cde(summary, code, level)
            .to_json_dict(summary.n_by_stratum[code])
            for code in summary.strata
        }
    if args.format == "csv":
        entries = [v for v in report.values() if isinstance(v, dict) and "estimand" in v]
        entries += list(report.get("conditional_cde", {}).values())
        header, rows = _estimates_to_rows(_round_floats(entries))
        writer.write_csv("estimates.csv", header, rows)
    writer.write_json("estimates.json", report)
    return EXIT_OK


def cmd_survival(args: argparse.Namespace, writer: RunWriter) -> int:
    writer.record_input(args.input)
    table = load_subject_table(args.input, MODE_TTE, interval_count=args.interval_count)
    event_table = build_event_table(table)
    hazards = survival.discrete_hazards(event_table)
    incidences = survival.cumulative_incidence(hazards)

    counts_rows = []
    for k in range(event_table.interval_count):
        for a in (0, 1):
            counts_rows.append([
                k + 1,
                a,
                int(event_table.at_risk[a, k]),
                int(event_table.censored[a, k]),
                int(event_table.events[a, k]),
                float(hazards.hazard[a, k]) if hazards.defined[a, k] else None,
                float(incidences.incidence[a, k])
                if k < incidences.valid_through[a]
                else None,
            ])
    writer.write_csv(
        "survival_counts.csv",
        ["k", "arm", "at_risk", "censored", "events", "hazard", "cum_incidence"],
        counts_rows,
    )

    ratios = survival.relative_cece_curve(incidences, args.level)
    bounds = survival.absolute_cece_bounds_curve(incidences, args.level)
    curve_rows = []
    for k, (ratio, bound) in enumerate(zip(ratios, bounds)):
        if ratio is None or bound is None:
            continue
        curve_rows.append([
            k + 1,
            ratio.point,
            ratio.ci_lower,
            ratio.ci_upper,
            bound.lower.point,
            bound.upper.point,
        ])
    writer.write_csv(
        "survival_curves.csv",
        ["k", "rcece", "rcece_lo", "rcece_hi", "acece_lower", "acece_upper"],
        curve_rows,
    )
    horizon = min(incidences.valid_through)
    if horizon < event_table.interval_count:
        print(
            f"warning: curves truncated at interval {horizon} "
            "(empty risk set beyond)",
            file=sys.stderr,
        )
    return EXIT_OK


def _sensitivity_point_dict(point: sensitivity.SensitivityPoint) -> dict:
    out = {
        "p_exposure": point.p_exposure,
        "p_outcome_given_exposure": point.p_outcome_given_exposure,
        "acece": point.acece,
    }
    if point.level is not None:
        out["ci"] = [point.ci_lower, point.ci_upper]
        out["level"] = point.level
    return out


def cmd_sensitivity(args: argparse.Namespace, writer: RunWriter) -> int:
    chosen = [args.p_exposure is not None, args.p_outcome is not None,
              args.grid is not None]
    if sum(chosen) != 1:
        raise InputError("give exactly one of --p-exposure, --p-outcome, --grid")
    if getattr(args, "mode", None) is None:
        args.mode = "point"
    summary = _summary_from_args(args, writer)
    level = args.level if args.ci else None

    if args.grid is not None:
        curve = sensitivity.sensitivity_sweep(summary, args.grid, level=level)
        rows = [
            [p.p_exposure, p.p_outcome_given_exposure, p.acece]
            for p in curve.points
        ]
        writer.write_csv(
            "sensitivity_sweep.csv",
            ["p_exposure", "p_outcome_given_exposure", "acece"],
            rows,
        )
        writer.write_json(
            "sensitivity_sweep.json",
            {
                "orientation_swapped": curve.orientation_swapped,
                "points": [_sensitivity_point_dict(p) for p in curve.points],
            },
        )
        return EXIT_OK

    if args.p_exposure is not None:
        point = sensitivity.acece_from_exposure_risk(summary, args.p_exposure, level)
    else:
        point = sensitivity.acece_from_outcome_risk(summary, args.p_outcome, level)
    payload = _sensitivity_point_dict(point)
    if args.format == "csv":
        writer.write_csv(
            "sensitivity.csv",
            ["p_exposure", "p_outcome_given_exposure", "acece"],
            [[point.p_exposure, point.p_outcome_given_exposure, point.acece]],
        )
    writer.write_json("sensitivity.json", payload)
    return EXIT_OK


def _load_config(path: str, seed_override: int | None) -> simulator.SimulationConfig:
    with open(path, "r", encoding="utf-8") as handle:
        raw = yaml.safe_load(handle)
    if not isinstance(raw, dict):
        raise InputError(f"config must be a key-value document: {path}")
    try:
        config = simulator.config_from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid config {path}: {exc}") from None
    if seed_override is not None:
        from dataclasses import replace

        config = replace(config, seed=seed_override)
    return config


def cmd_simulate(args: argparse.Namespace, writer: RunWriter) -> int:
    writer.record_input(args.config)
    config = _load_config(args.config, args.seed)
    if config.longitudinal is None:
        table = simulator.simulate_point_trial(config)
    else:
        table = simulator.simulate_survival_trial(config)

    levels = config.covariate_levels
    header = ["id", "arm", "l1", "e0", "e1", "y0", "y1"]
    longitudinal = table.is_longitudinal
    if longitudinal:
        header += ["event_interval", "censor_interval"]
    rows = []
    for i in range(table.n):
        row = [
            i,
            int(table.arm[i]),
            levels[table.stratum_index[i]],
            int(table.e0[i]),
            int(table.e1[i]),
            int(table.y0[i]),
            int(table.y1[i]),
        ]
        if longitudinal:
            ev = int(table.event_interval[i])
            ce = int(table.censor_interval[i])
            row += [ev if ev > 0 else None, ce if ce > 0 else None]
        rows.append(row)
    writer.write_csv("counterfactual.csv", header, rows)

    buf = io.StringIO()
    write_subject_table(table.observed_table(), buf)
    writer.write_text("observed.csv", buf.getvalue())
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, writer: RunWriter) -> int:
    if args.n < 1:
        raise InputError(f"cohort size must be >= 1, got {args.n}")
    if args.config is not None:
        writer.record_input(args.config)
        config = _load_config(args.config, args.seed)
        report = validation.run_config_suite(config)
    else:
        seed = args.seed if args.seed is not None else 20240811
        report = validation.run_builtin_suite(n=args.n, seed=seed)
    writer.write_json("validation_report.json", report)
    for check in report["checks"]:
        print(f"{check['status']:>28}  {check['name']}", file=sys.stderr)
    return EXIT_OK if report["all_ok"] else EXIT_VALIDATION


# --- entry point -------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    writer = RunWriter(Path(args.out_dir), args)
    try:
        if not 0.0 < args.level < 1.0:
            raise InputError(f"confidence level must be in (0, 1), got {args.level}")
        code = args.func(args, writer)
    except InputError as exc:
        _emit_error(writer, "input", exc, EXIT_INPUT)
        return EXIT_INPUT
    except EstimationError as exc:
        _emit_error(writer, "estimation", exc, EXIT_ESTIMATION)
        return EXIT_ESTIMATION
    except OSError as exc:
        _emit_error(writer, "input", exc, EXIT_INPUT)
        return EXIT_INPUT
    writer.finalize()
    return code


def _emit_error(writer: RunWriter, kind: str, exc: Exception, code: int) -> None:
    payload = {"error": {"kind": kind, "message": str(exc), "exit_code": code}}
    line = getattr(exc, "line", None)
    if line is not None:
        payload["error"]["line"] = line
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
