#!/usr/bin/env python3
"""Word search -> loop erasure -> branch marks -> embedded tree -> bracket.

Searches long words with growing inverted orbits, erases the orbit-flat
loops, builds the spherically symmetric tree the marks describe, and
brackets its branching number against the measured orbit exponent and the
analytic target log 2 / log(2/eta) ~ 0.7674.
"""

import argparse
import math

from ibntrees import generators as gen
from ibntrees import grigorchuk as gg
from ibntrees.flowcut import DepthSchedule, ibn_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--length", type=int, default=256)
    ap.add_argument("--beam", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    word = gg.search_word(args.length, args.beam, args.seed)
    erased = gg.loop_erase(word)
    bm = gg.branch_marks(erased)
    exponent = math.log(float(bm.sizes[-1])) / math.log(bm.word_length)
    print(f"word length {len(word)} -> {len(erased)} after loop erasure, "
          f"orbit {int(bm.sizes[-1])}, exponent {exponent:.3f} "
          f"(analytic target {gg.orbit_growth_exponent():.4f})")

    maxd = bm.max_tree_depth()
    fam = gen.marks_family(bm.tree_marks(maxd))
    depths = tuple(d for d in (16, 32, 64, 128, 256, maxd) if d <= maxd)
    res = ibn_estimate(fam, DepthSchedule(depths))
    print(f"embedded tree depth {maxd}, branching-number bracket {res.interval()}, "
          f"undecided {res.undecided}")


if __name__ == "__main__":
    main()
