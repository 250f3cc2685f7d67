"""Dump every noiseless one-bit receive point h^H x of one channel to CSV."""
import argparse
import csv
from pathlib import Path

from onebit_mimo.sim import load_config, precode_once

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", default=str(CONFIGS / "scatter.txt"))
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", default="scatter_points.csv")
    args = p.parse_args()
    report = precode_once(load_config(args.config, args.set), scatter=True)
    sc = report["scatter"]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        w.writerows(sc["points"])
    print(f"{len(sc['points'])} points -> {args.out}")
    print(f"radius sqrt(2P)||h||       = {sc['radius_inf_total']:.4f}")
    print(f"radius sqrt(2/pi) of that  = {sc['radius_one_bit']:.4f}")
    print(f"fraction inside inner disc = {sc['fraction_inside_one_bit']:.4f}")
    for s in report["schemes"]:
        print(f"{s['scheme']:>14}: residual {s['residual_inf']:.3e}")


if __name__ == "__main__":
    main()
