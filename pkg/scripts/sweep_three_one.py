#!/usr/bin/env python3
"""Min-cut decay of the stretched 3-1 tree, far beyond materializable depths.

The structured evaluator runs on base levels (depth m(m+1)/2), so the decay
toward zero is visible for every rate even though it is double-logarithmic
in the truncation depth for small rates.
"""

import argparse
import math

from ibntrees.flowcut import three_one_log_min_cut
from ibntrees.generators import triangular


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", default="32,128,512,2048",
                    help="comma list of base levels (depth = m(m+1)/2)")
    ap.add_argument("--grid", default="0.1,0.2,0.3,0.4,0.5,0.7,0.9")
    args = ap.parse_args()

    ms = [int(x) for x in args.levels.split(",")]
    grid = [float(x) for x in args.grid.split(",")]
    print("lambda," + ",".join(f"log_mincut@depth_{triangular(m)}" for m in ms))
    for lam in grid:
        vals = [three_one_log_min_cut(lam, m) for m in ms]
        print(f"{lam}," + ",".join(f"{v:.4f}" for v in vals))


if __name__ == "__main__":
    main()
