"""MSE versus normalised constellation range; prints where each scheme leaves the plateau."""
from _common import parser, run

import numpy as np


def main():
    args = parser("mse_single_user.txt", __doc__).parse_args()
    cfg, table = run(args)
    for spec in cfg.schemes:
        lam, mse, se, _ = table.series(spec.label, "mse")
        print(f"\n{spec.label}")
        for x, m, e in zip(lam, mse, se):
            print(f"  {table.sweep_name} = {x:5.2f}   mse = {m:.3e} +- {e:.1e}")
        above = lam[mse > 1e-3 * cfg.power]
        print(f"  first range above 1e-3 P: {above[0] if above.size else np.nan}")


if __name__ == "__main__":
    main()
