"""Command line entry point: ``onebit-mimo <subcommand> --config <path> ...``.

On failure a single JSON line ``{"error": ..., "message": ...}`` is written
to stderr and the exit status is non-zero.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config, parse_config_text
from .harness import precode_once, run_experiment
from .table import emit_table

SUBCOMMANDS = {
    "mse-sweep": "mse_sweep",
    "ser-vs-snr": "ser_vs_snr",
    "ser-vs-antennas": "ser_vs_antennas",
    "precode-once": "precode_once",
}


def _complex_list(text: str):
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex list {text!r}") from exc


def _build_parser():
    parser = argparse.ArgumentParser(prog="onebit-mimo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
        p.add_argument("--seed", type=lambda v: int(v, 0), help="master seed (overrides config)")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv" if name != "precode-once" else "json")
        p.add_argument("--threads", type=int, default=1, help="worker processes; never changes results")
        if name == "precode-once":
            p.add_argument("--symbols", type=_complex_list, help="explicit target symbols, e.g. '1+1j,-0.5j'")
            p.add_argument("--channel", help="explicit channel rows h_k^H: comma-separated entries, ';' between rows")
            p.add_argument("--scatter", action="store_true", help="include all 4^M receive points (M <= 12)")
    return parser


def _load(args, kind) -> ExperimentConfig:
    overrides = list(args.set) + [f"kind={kind}"]
    if args.seed is not None:
        overrides.append(f"master_seed={args.seed}")
    if args.config:
        return load_config(args.config, overrides)
    return parse_config_text("", overrides)


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = _load(args, SUBCOMMANDS[args.command])
        if args.command == "precode-once":
            channel = None
            if args.channel:
                channel = np.array([_complex_list(row) for row in args.channel.split(";")])
            report = precode_once(cfg, symbols=args.symbols, channel=channel, scatter=args.scatter)
            if args.format == "csv":
                raise ConfigError("precode-once writes JSON only")
            _write(json.dumps(report, indent=1) + "\n", args.out)
        else:
            table = run_experiment(cfg, threads=args.threads)
            _write(emit_table(table, args.format), args.out)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
