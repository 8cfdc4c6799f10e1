"""Command-line front end: experiment orchestration with manifested outputs.

Every run writes its data file plus a JSON manifest (config echo, package
version, seed, timestamp) next to it; identical (config, seed) pairs
reproduce data files byte for byte.  CSV uses a header row, '.' decimals
and repr-round-trip floats.  Exit codes: 0 success, 1 runtime failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, firefighter, flowcut, generators, grigorchuk, nathanson, percolation, walks
from .trees import Tree


@dataclass
class ExperimentConfig:
    """Everything that determines a run; round-trips through JSON."""

    subcommand: str
    options: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        raw = json.loads(text)
        return ExperimentConfig(raw["subcommand"], raw["options"])


def _outdir() -> str:
    return os.environ.get("IBNTREES_OUTDIR", ".")


def _resolve(path: str) -> str:
    return path if os.path.isabs(path) else os.path.join(_outdir(), path)


def _write_manifest(data_path: str, config: ExperimentConfig, summary: dict) -> None:
    manifest = {
        "config": asdict(config),
        "version": __version__,
        "seed": config.options.get("seed"),
        "summary": summary,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(data_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def _parse_grid(text: str) -> tuple[float, ...]:
    """a:b:step or a comma list."""
    if ":" in text:
        a, b, step = (float(x) for x in text.split(":"))
        n = int(round((b - a) / step)) + 1
        return tuple(round(a + i * step, 10) for i in range(n) if a + i * step <= b + 1e-12)
    return tuple(float(x) for x in text.split(","))


def _parse_depths(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _load_source(opts: dict):
    """Tree file, named family, or marks family, per the options."""
    if opts.get("tree"):
        with open(opts["tree"]) as fh:
            return Tree.from_text(fh.read())
    marks = None
    if opts.get("marks_file"):
        marks = _read_marks(opts["marks_file"])
    return generators.family_by_name(opts["family"], marks)


def _read_marks(path: str) -> list[bool]:
    with open(path) as fh:
        return [line.strip() == "1" for line in fh if line.strip() and not line.startswith("#")]


def _schedule(opts: dict) -> flowcut.DepthSchedule:
    return flowcut.DepthSchedule(
        _parse_depths(opts["schedule"]),
        eps_stop=opts.get("eps_stop", 1e-6),
        c_stay=opts.get("c_stay", 1e-3),
    )


# -- subcommand handlers -------------------------------------------------------


def _run_generate(config: ExperimentConfig) -> dict:
    opts = config.options
    source = _load_source(opts)
    tree = source if isinstance(source, Tree) else source.build(opts["depth"])
    out = _resolve(opts["out"])
    with open(out, "w") as fh:
        fh.write(tree.to_text())
    return {"vertices": tree.n_vertices, "height": tree.height(), "out": out}


def _grid_map(fn, grid, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, grid))
    return [fn(g) for g in grid]


def _run_estimate_ibn(config: ExperimentConfig) -> dict:
    opts = config.options
    source = _load_source(opts)
    schedule = _schedule(opts)
    grid = _parse_grid(opts["grid"])

    results = _grid_map(
        lambda lam: flowcut.ibn_estimate(source, schedule, grid=(lam,)),
        grid, opts.get("threads", 1))
    rows = []
    classifications = {}
    trajectories = {}
    for lam, res in zip(grid, results):
        classifications[lam] = res.classifications[lam]
        trajectories[lam] = res.trajectories[lam]
        for depth, logv in zip(res.depths_used[lam], res.trajectories[lam]):
            rows.append([lam, depth, math.exp(logv) if logv > -700 else 0.0,
                         res.classifications[lam]])
    below = [g for g in grid if classifications[g] == "below"]
    above = [g for g in grid if classifications[g] == "above"]
    lower = max(below) if below else None
    upper = min(above) if above else None
    out = _resolve(opts["out"])
    _write_csv(out, ["lambda", "depth", "mincut", "classification"], rows)
    summary = {"ibn_lower": lower, "ibn_upper": upper,
               "family": opts.get("family"), "out": out}
    if not isinstance(source, Tree):
        N = schedule.depths[-1]
        est = flowcut.igr_estimate(source.level_log2_sizes(N), N)
        summary["igr"] = est.estimate
    return summary


def _run_walk(config: ExperimentConfig) -> dict:
    opts = config.options
    source = _load_source(opts)
    lam, trials = opts["lam"], opts["trials"]
    cap, seed = opts.get("cap", 10 ** 6), opts["seed"]
    rows = []
    if isinstance(source, Tree) or source.degree is None:
        tree = source if isinstance(source, Tree) else source.build(opts["depth"])
        cf = walks.deterministic_conductances(tree, lam)
        for t in range(trials):
            r = walks.simulate_walk(tree, cf, cap, seed, t)
            rows.append([t, int(r.returned), r.steps, r.max_depth])
    else:
        returned, steps, maxd = walks.depth_walk_batch(
            source.degree, lam, opts["depth"], trials, cap, seed)
        rows = [[t, int(returned[t]), int(steps[t]), int(maxd[t])] for t in range(trials)]
    out = _resolve(opts["out"])
    _write_csv(out, ["trial", "returned", "steps", "maxdepth"], rows)
    freq = float(np.mean([r[1] for r in rows]))
    return {"return_frequency": freq, "trials": trials, "out": out}


def _run_rwrc(config: ExperimentConfig) -> dict:
    opts = config.options
    source = _load_source(opts)
    schedule = _schedule(opts)
    grid = _parse_grid(opts["gamma_grid"])
    N = schedule.depths[-1]
    tree = source if isinstance(source, Tree) else source.build(N)
    field = walks.sample_conductances(tree, opts["lam"], opts["seed"])
    psi = walks.psi_field(tree, field, N)
    res = walks.rt_estimate(tree, psi, grid, schedule)
    rows = []
    for g in grid:
        for depth, logv in zip(schedule.depths, res.trajectories[g]):
            rows.append([g, depth, math.exp(logv) if logv > -700 else 0.0,
                         res.classifications[g]])
    out = _resolve(opts["out"])
    _write_csv(out, ["gamma", "depth", "rtvalue", "class"], rows)
    tag = f"rt@{opts['lam']:g}"
    return {f"{tag}_lower": res.lower, f"{tag}_upper": res.upper,
            "lam": opts["lam"], "out": out}


def _run_percolate(config: ExperimentConfig) -> dict:
    opts = config.options
    source = _load_source(opts)
    depths = _parse_depths(opts["depths"])
    grid = _parse_grid(opts["grid"]) if opts.get("grid") else (opts["lam"],)
    mc_trials = opts.get("mc", 0)
    seed = opts.get("seed", 0)
    rows = []
    for lam in grid:
        law = percolation.PercolationLaw(lam)
        for N in depths:
            if isinstance(source, Tree):
                exact = percolation.exact_survival(source, law, N)
                bound = percolation.conductance_bound(source, law, N)
            elif source.degree is not None:
                exact = percolation.survival_symmetric(source.degree, law, N)
                bound = percolation.conductance_bound_symmetric(source, lam, N)
            else:
                tree = source.build(N)
                exact = percolation.exact_survival(tree, law, N)
                bound = percolation.conductance_bound(tree, law, N)
            mc, err = (float("nan"), float("nan"))
            if mc_trials:
                tree = source if isinstance(source, Tree) else source.build(N)
                mc, err = percolation.mc_survival(tree, law, N, mc_trials, seed)
            rows.append([lam, N, exact, mc, err, bound])
    out = _resolve(opts["out"])
    _write_csv(out, ["lambda", "depth", "exact", "mc", "stderr", "bound"], rows)
    summary = {"out": out, "family": opts.get("family")}
    if opts.get("grid"):
        schedule = flowcut.DepthSchedule(depths)
        res = percolation.theta_estimate(source, schedule, grid)
        summary |= {"theta_lower": res.lower, "theta_upper": res.upper}
    return summary


def _run_firefight(config: ExperimentConfig) -> dict:
    opts = config.options
    source = _load_source(opts)
    grid = _parse_grid(opts["gamma_grid"])
    schedule = flowcut.DepthSchedule(_parse_depths(opts["schedule"]))
    res = firefighter.lambda_c_estimate(source, opts["k"], grid, opts.get("K", 1.0), schedule)
    rows = []
    for g in grid:
        a = res.attempts[g]
        rows.append([g, opts.get("horizon", schedule.depths[-1]), int(a.contained),
                     a.fire_size, a.protected_size])
    out = _resolve(opts["out"])
    _write_csv(out, ["gamma", "horizon", "contained", "fire_size", "protected_size"], rows)
    return {"lambdac_lower": res.lower, "lambdac_upper": res.upper,
            "family": opts.get("family"), "out": out,
            "reasons": {str(g): res.attempts[g].reason for g in grid}}


def _run_nathanson(config: ExperimentConfig) -> dict:
    opts = config.options
    n = opts["depth"]
    lt = nathanson.lex_tree(n)
    summary: dict = {"vertices": lt.tree.n_vertices}
    if opts.get("emit_tree"):
        path = _resolve(opts["emit_tree"])
        with open(path, "w") as fh:
            fh.write(lt.tree.to_text())
        summary["tree_out"] = path
    if opts.get("emit_stats"):
        ball, level = nathanson.ball_sizes(n)
        rows = []
        for m in range(1, n + 1):
            ratio = (math.log(math.log(float(ball[m]))) / math.log(m)
                     if ball[m] > 2 and m > 1 else 0.0)
            rows.append([m, int(ball[m]), int(level[m]), ratio])
        path = _resolve(opts["emit_stats"])
        _write_csv(path, ["n", "ball", "level", "loglog_ratio"], rows)
        summary["stats_out"] = path
        summary["igr_endpoint"] = rows[-1][3]
    return summary


def _run_grig(config: ExperimentConfig) -> dict:
    opts = config.options
    n, beam, seed = opts["search"], opts.get("beam", 256), opts["seed"]
    word = grigorchuk.search_word(n, beam, seed)
    erased = grigorchuk.loop_erase(word)
    bm = grigorchuk.branch_marks(erased)
    summary = {"word_length": len(word), "erased_length": len(erased),
               "orbit": int(bm.sizes[-1])}
    if opts.get("emit_marks"):
        path = _resolve(opts["emit_marks"])
        depth = bm.max_tree_depth()
        tm = bm.tree_marks(depth)
        with open(path, "w") as fh:
            fh.write(f"# word={erased} orbit={int(bm.sizes[-1])} depth={depth}\n")
            for v in tm:
                fh.write("1\n" if v else "0\n")
        summary["marks_out"] = path
    return summary


def _run_report(config: ExperimentConfig) -> dict:
    opts = config.options
    directory = opts["results_dir"]
    rows: dict[tuple, dict] = {}
    skipped = []
    for name in sorted(os.listdir(directory)):
        if not name.endswith(".manifest.json"):
            continue
        path = os.path.join(directory, name)
        try:
            with open(path) as fh:
                manifest = json.load(fh)
            summary = manifest["summary"]
            cfg = manifest["config"]
        except (json.JSONDecodeError, KeyError) as exc:
            skipped.append(f"{name}: {exc}")
            continue
        key = (summary.get("family") or cfg["options"].get("family") or cfg["subcommand"],
               cfg["options"].get("seed"))
        row = rows.setdefault(key, {})
        for field_name, value in summary.items():
            fixed = field_name in ("igr", "ibn_lower", "ibn_upper", "theta_lower",
                                   "theta_upper", "lambdac_lower", "lambdac_upper")
            if (fixed or field_name.startswith("rt@")) and value is not None:
                row[field_name] = value
    rt_cols = sorted({k for row in rows.values() for k in row if k.startswith("rt@")})
    header = ["family", "seed", "igr", "ibn_lower", "ibn_upper", "theta_lower",
              "theta_upper", "lambdac_lower", "lambdac_upper"] + rt_cols
    table = []
    for (family, seed), row in sorted(rows.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
        if not row:
            continue
        table.append([family, seed] + [row.get(h, "") for h in header[2:]])
    for warning in skipped:
        print(f"warning: skipped {warning}", file=sys.stderr)
    print(",".join(header))
    for row in table:
        print(",".join(str(x) for x in row))
    if opts.get("out"):
        _write_csv(_resolve(opts["out"]), header, table)
    return {"rows": len(table), "skipped": len(skipped)}


_HANDLERS = {
    "generate": _run_generate,
    "estimate-ibn": _run_estimate_ibn,
    "walk": _run_walk,
    "rwrc": _run_rwrc,
    "percolate": _run_percolate,
    "firefight": _run_firefight,
    "nathanson": _run_nathanson,
    "grig": _run_grig,
    "report": _run_report,
}


def run(config: ExperimentConfig) -> int:
    """Dispatch a config; write outputs and a manifest per data file."""
    try:
        summary = _HANDLERS[config.subcommand](config)
    except (ValueError, KeyError, OSError, generators.MemoryCapError,
            nathanson.BallCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for key in ("out", "tree_out", "stats_out", "marks_out"):
        if summary.get(key):
            _write_manifest(summary[key], config, summary)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibntrees",
        description="Branching-number estimates and random processes on "
                    "intermediate-growth trees.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed=True, family=False, tree=False):
        p.add_argument("--threads", type=int, default=1)
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if family:
            p.add_argument("--family", choices=["seq", "three-one", "binary", "path", "marks"])
            p.add_argument("--marks-file", dest="marks_file")
        if tree:
            p.add_argument("--tree")

    p = sub.add_parser("generate", help="materialize a tree truncation")
    common(p, family=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate-ibn", help="bracket the branching number")
    common(p, family=True, tree=True)
    p.add_argument("--grid", default="0.05:0.95:0.05")
    p.add_argument("--schedule", default="16,32,64,128,256,512,1024")
    p.add_argument("--eps-stop", dest="eps_stop", type=float, default=1e-6)
    p.add_argument("--c-stay", dest="c_stay", type=float, default=1e-3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("walk", help="conductance-weighted walks from the root")
    common(p, family=True, tree=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--depth", type=int, default=128)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rwrc", help="random-conductance recurrence classifier")
    common(p, family=True, tree=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--gamma-grid", dest="gamma_grid", default="0.25:2.0:0.25")
    p.add_argument("--schedule", default="16,32,64,128")
    p.add_argument("--out", required=True)

    p = sub.add_parser("percolate", help="independent percolation survival")
    common(p, family=True, tree=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--grid")
    p.add_argument("--depths", default="16,32,64,128")
    p.add_argument("--mc", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("firefight", help="containment-threshold attempts")
    common(p, family=True, tree=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--K", dest="K", type=float, default=1.0)
    p.add_argument("--gamma-grid", dest="gamma_grid", default="0.2:0.9:0.1")
    p.add_argument("--schedule", default="8,16,32,64,128,200")
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--out", required=True)

    p = sub.add_parser("nathanson", help="matrix semigroup ball and spanning tree")
    common(p)
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--emit-tree", dest="emit_tree")
    p.add_argument("--emit-stats", dest="emit_stats")

    p = sub.add_parser("grig", help="inverted-orbit word search and branch marks")
    common(p)
    p.add_argument("--search", type=int, required=True)
    p.add_argument("--beam", type=int, default=256)
    p.add_argument("--emit-marks", dest="emit_marks")

    p = sub.add_parser("report", help="merge manifested runs into one table")
    common(p, seed=False)
    p.add_argument("results_dir")
    p.add_argument("--out")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = vars(parser.parse_args(argv))
    sub = args.pop("subcommand")
    options = {k: v for k, v in args.items() if v is not None}
    return run(ExperimentConfig(sub, options))


if __name__ == "__main__":
    sys.exit(main())
