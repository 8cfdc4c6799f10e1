#!/usr/bin/env python3
"""Run the full experiment battery into a results directory and print the
summary table (one row per family: growth index, branching-number bracket,
percolation bracket, containment bracket, walk classifier brackets)."""

import argparse
import subprocess
import sys


def cli(args, outdir):
    cmd = [sys.executable, "-m", "ibntrees.cli"] + args
    print("+", " ".join(args))
    subprocess.run(cmd, cwd=outdir, check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", help="directory for CSV outputs and manifests")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="shallower schedules")
    args = ap.parse_args()

    depth_sched = "16,32,64,128" if args.quick else "16,32,64,128,256,512,1024"
    perc_depths = "16,32,64" if args.quick else "16,32,64,128"
    seed = ["--seed", str(args.seed)]

    cli(["estimate-ibn", "--family", "seq", "--grid", "0.05:0.95:0.05",
         "--schedule", depth_sched, "--out", "seq_ibn.csv"] + seed, args.outdir)
    cli(["percolate", "--family", "seq", "--grid", "0.05:0.95:0.05",
         "--depths", perc_depths, "--out", "seq_theta.csv"] + seed, args.outdir)
    cli(["firefight", "--family", "seq", "--k", "2", "--gamma-grid", "0.2:0.9:0.1",
         "--schedule", "8,16,32,64,128,200", "--out", "seq_fire.csv"] + seed, args.outdir)
    for lam in ("0.3", "0.7"):
        cli(["rwrc", "--family", "seq", "--lambda", lam,
             "--gamma-grid", "0.25:2.0:0.25", "--schedule", "16,32,64,128",
             "--out", f"seq_rwrc_{lam}.csv"] + seed, args.outdir)
        cli(["walk", "--family", "seq", "--lambda", lam, "--depth", "512",
             "--trials", "2000", "--cap", "100000",
             "--out", f"seq_walk_{lam}.csv"] + seed, args.outdir)

    # the stretched 3-1 tree: every tested rate classifies above
    cli(["estimate-ibn", "--family", "three-one", "--grid", "0.4:0.9:0.1",
         "--schedule", "528,2080,8256,32896,131328",
         "--out", "three_one_ibn.csv"] + seed, args.outdir)

    cli(["nathanson", "--depth", "40" if args.quick else "60",
         "--emit-stats", "nathanson_stats.csv"] + seed, args.outdir)
    cli(["grig", "--search", "128", "--beam", "64",
         "--emit-marks", "grig_marks.txt"] + seed, args.outdir)
    cli(["generate", "--family", "marks", "--marks-file", "grig_marks.txt",
         "--depth", "24", "--out", "wreath_tree.txt"] + seed, args.outdir)

    print("\nsummary:")
    cli(["report", "."], args.outdir)


if __name__ == "__main__":
    main()
