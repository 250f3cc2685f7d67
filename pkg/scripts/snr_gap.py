"""SER versus SNR; prints the SNR gap of every scheme to the first one at a target SER."""
from _common import parser, run

from onebit_mimo.metrics import power_gap_db
from onebit_mimo.sim import gap_at


def main():
    p = parser("ser_single_user.txt", __doc__)
    p.add_argument("--target", type=float, default=1e-2)
    args = p.parse_args()
    cfg, table = run(args)
    ref = cfg.schemes[0].label
    for spec in cfg.schemes:
        snr, ser, se, ana = table.series(spec.label, "ser")
        print(f"\n{spec.label}")
        for x, y, e, a in zip(snr, ser, se, ana):
            print(f"  snr = {x:6.1f} dB   ser = {y:.3e} +- {e:.1e}   analytic = {a:.3e}")
        if spec.label != ref:
            print(f"  gap to {ref} at SER {args.target:g}: {gap_at(table, ref, spec.label, args.target):.2f} dB")
    print(f"\npredicted one-bit gap: {power_gap_db():.4f} dB")


if __name__ == "__main__":
    main()
