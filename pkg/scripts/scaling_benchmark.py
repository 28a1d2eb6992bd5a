"""Time the maskers over the n, p and n_c sweeps and fit log-log slopes.

Equivalent to ``sdshuffle bench`` but prints a per-method slope table for
all methods by default.
"""

import argparse
import csv

from sdshuffle.baselines import Method
from sdshuffle.bench import SLOPE_RANGES, SWEEPS, run_sweep, sweep_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--methods", default="sjppds-s,sjppds-f")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", default="scaling_benchmark.csv")
    args = ap.parse_args()

    methods = [Method(m) for m in args.methods.split(",")]
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep", "method", "n", "p", "n_c", "seconds"])
        for sweep in SWEEPS:
            rows = run_sweep(sweep, methods, args.repeats, args.seed)
            for r in rows:
                w.writerow([sweep, r.method, r.n, r.p, r.n_c, r.seconds])
            for m in methods:
                lo, hi = SLOPE_RANGES[sweep]
                print(f"{sweep:>4} {m.value:>10}: slope {sweep_slope(rows, sweep, m.value):.3f} "
                      f"(SJPPDS-s target {lo}-{hi})")


if __name__ == "__main__":
    main()
