"""SER versus antenna count; prints the antenna ratio needed for the same target SER."""
from _common import parser, run

from onebit_mimo.metrics import antenna_factor
from onebit_mimo.sim import interpolate_crossing


def main():
    p = parser("ser_vs_antennas.txt", __doc__)
    p.add_argument("--target", type=float, default=1e-3)
    args = p.parse_args()
    cfg, table = run(args)
    crossings = {}
    for spec in cfg.schemes:
        m, ser, se, ana = table.series(spec.label, "ser")
        print(f"\n{spec.label}")
        for x, y, e, a in zip(m, ser, se, ana):
            print(f"  M = {int(x):4d}   ser = {y:.3e} +- {e:.1e}   analytic = {a:.3e}")
        crossings[spec.label] = interpolate_crossing(m, ser, args.target)
        print(f"  M at SER {args.target:g}: {crossings[spec.label]:.1f}")
    labels = list(crossings)
    if len(labels) > 1:
        print(f"\nratio {labels[1]} / {labels[0]}: {crossings[labels[1]] / crossings[labels[0]]:.3f}"
              f" (predicted {antenna_factor():.4f})")


if __name__ == "__main__":
    main()
