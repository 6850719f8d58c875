"""Command-line entry point: ``oasis-svar <command> --config study.yaml``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, OasisError, StageError
from .study import (
    ALL_PARTS,
    emit_scatter,
    format_report_table,
    load_configs,
    metadata,
    read_report_csv,
    report_csv,
    run_study,
    stage,
    write_estimation,
    write_identification,
    write_irfs,
    write_metadata,
    write_proxy,
    write_scan,
    write_scatter,
    write_study,
)
from .data_io import atomic_write

log = logging.getLogger("oasis_svar")

PARTS = {
    "estimate": frozenset(),
    "identify": frozenset({"identify", "scan"}),
    "scan": frozenset({"scan"}),
    "proxy": frozenset({"proxy"}),
    "irf": frozenset({"irf"}),
    "report": ALL_PARTS,
}


def _out_dir(args, cfg, batch: bool, manifest_out) -> Path:
    if args.out is not None:
        base = Path(args.out)
        return base / cfg.label if batch else base
    if cfg.output is not None:
        return cfg.output
    if manifest_out is not None:
        return manifest_out / cfg.label
    return Path("out") / cfg.label


def _write(command: str, out, out_dir: Path) -> list:
    if command == "report":
        return write_study(out_dir, out)
    files = write_estimation(out_dir, out.config, out.panel, out.model)
    if command == "identify":
        files += write_identification(out_dir, out)
    elif command == "scan":
        files += write_scan(out_dir, out)
    elif command == "irf":
        files += write_irfs(out_dir, out)
    elif command == "proxy":
        if out.proxy is None:
            raise StageError("proxy", ConfigError("config has no proxy section"))
        files += write_proxy(out_dir, out)
    files.append("metadata.json")
    write_metadata(out_dir, metadata(out, files, command))
    return files


def _run(command: str, args) -> int:
    with stage("config"):
        configs, manifest_out = load_configs(args.config)
    batch = len(configs) > 1
    rows = []
    for cfg in configs:
        log.info("%s: %s", command, cfg.label)
        out = run_study(cfg, budget=args.budget, seed=args.seed, horizon=args.horizon, parts=PARTS[command])
        out_dir = _out_dir(args, cfg, batch, manifest_out)
        _write(command, out, out_dir)
        if out.row is not None:
            rows.append(out.row)
        print(f"{cfg.label}: wrote {out_dir}")
    if command == "report":
        if batch:
            combined = Path(args.out) if args.out is not None else (manifest_out or Path("out"))
            atomic_write(combined / "report.csv", report_csv(rows))
            atomic_write(combined / "report.txt", format_report_table(rows))
            write_scatter(combined, emit_scatter(rows))
            print(f"combined report: {combined}")
        print(format_report_table(rows), end="")
    return 0


def _scatter(args) -> int:
    if args.rows is not None:
        rows = read_report_csv(args.rows)
        default_out = Path(args.rows).parent
    else:
        with stage("config"):
            configs, manifest_out = load_configs(args.config)
        rows = [
            run_study(c, budget=args.budget, seed=args.seed, parts={"identify", "scan"}).row for c in configs
        ]
        default_out = manifest_out or Path("out")
    out_dir = Path(args.out) if args.out is not None else default_out
    data = emit_scatter(rows)
    write_scatter(out_dir, data)
    for study, reason in data.skipped:
        print(f"skipped {study}: {reason}", file=sys.stderr)
    print(f"scatter: {len(data.points)} points written to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oasis-svar",
        description="Maximum-correlation (OASIS), Cholesky and proxy identification of VAR shocks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "estimate": "estimate the reduced-form VAR and write Σ, residuals, coefficients",
        "identify": "OASIS and Cholesky identification matrices, rotation and shock correlations",
        "scan": "range of the average Cholesky correlation over variable orderings",
        "proxy": "proxy / subset identification from the config's proxy section",
        "irf": "structural impulse responses for every scheme",
        "report": "full study pipeline; a manifest also writes the combined table and scatter data",
        "scatter": "proximity scatter data from report rows or configs",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        if name == "scatter":
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--config", help="study config or manifest")
            src.add_argument("--rows", help="report CSV written by the report command")
        else:
            p.add_argument("--config", required=True, help="study config or manifest (YAML)")
        p.add_argument("--seed", type=int, default=None, help="seed for sampled permutation scans")
        p.add_argument("--budget", type=int, default=None, help="maximum orderings to enumerate or sample")
        p.add_argument("--horizon", type=int, default=None, help="IRF horizon H")
        p.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "scatter":
            return _scatter(args)
        return _run(args.command, args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 2
    except OasisError as exc:
        print(f"error [{args.command}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
