import argparse
from pathlib import Path

from onebit_mimo.sim import emit_table, load_config, run_experiment

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def parser(default_config, doc):
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--config", default=str(CONFIGS / default_config))
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write the result table here (csv or json by suffix)")
    return p


def run(args):
    cfg = load_config(args.config, args.set)
    table = run_experiment(cfg, threads=args.threads)
    if args.out:
        emit_table(table, "json" if args.out.endswith(".json") else "csv", args.out)
    return cfg, table
