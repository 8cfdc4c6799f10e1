import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "ibntrees.cli"]


def run_cli(args, cwd, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(CLI + args, cwd=cwd, env=full_env,
                          capture_output=True, text=True)


def test_generate_and_round_trip(tmp_path):
    r = run_cli(["generate", "--family", "seq", "--depth", "8", "--out", "t.txt"], tmp_path)
    assert r.returncode == 0
    lines = (tmp_path / "t.txt").read_text().splitlines()
    assert lines[0] == "0 - 0"
    manifest = json.loads((tmp_path / "t.txt.manifest.json").read_text())
    assert manifest["config"]["subcommand"] == "generate"
    assert manifest["version"]


def test_unknown_flag_exits_2(tmp_path):
    r = run_cli(["generate", "--family", "seq", "--nope", "3"], tmp_path)
    assert r.returncode == 2


def test_unknown_family_exits_2(tmp_path):
    r = run_cli(["generate", "--family", "mystery", "--depth", "4", "--out", "x"], tmp_path)
    assert r.returncode == 2


def test_runtime_failure_exits_1(tmp_path):
    r = run_cli(["estimate-ibn", "--tree", "missing.txt", "--grid", "0.5:0.5:0.1",
                 "--schedule", "4,8", "--out", "x.csv"], tmp_path)
    assert r.returncode == 1
    assert "error" in r.stderr


def test_estimate_ibn_deterministic(tmp_path):
    args = ["estimate-ibn", "--family", "seq", "--grid", "0.3:0.7:0.1",
            "--schedule", "16,64,256", "--out", "a.csv"]
    assert run_cli(args, tmp_path).returncode == 0
    args2 = args[:-1] + ["b.csv"]
    assert run_cli(args2, tmp_path).returncode == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header == "lambda,depth,mincut,classification"


def test_walk_csv_and_seed_dependence(tmp_path):
    base = ["walk", "--family", "seq", "--lambda", "0.5", "--depth", "16",
            "--trials", "40", "--cap", "5000"]
    assert run_cli(base + ["--seed", "1", "--out", "w1.csv"], tmp_path).returncode == 0
    assert run_cli(base + ["--seed", "1", "--out", "w2.csv"], tmp_path).returncode == 0
    assert run_cli(base + ["--seed", "2", "--out", "w3.csv"], tmp_path).returncode == 0
    b1 = (tmp_path / "w1.csv").read_bytes()
    assert b1 == (tmp_path / "w2.csv").read_bytes()
    assert b1 != (tmp_path / "w3.csv").read_bytes()
    assert b1.splitlines()[0] == b"trial,returned,steps,maxdepth"


def test_percolate_on_tree_file(tmp_path):
    run_cli(["generate", "--family", "seq", "--depth", "12", "--out", "seq.txt"], tmp_path)
    r = run_cli(["percolate", "--tree", "seq.txt", "--lambda", "0.3",
                 "--depths", "4,8,12", "--mc", "500", "--seed", "5", "--out", "p.csv"], tmp_path)
    assert r.returncode == 0
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0] == "lambda,depth,exact,mc,stderr,bound"
    assert len(rows) == 4


def test_grig_marks_feed_generate(tmp_path):
    r = run_cli(["grig", "--search", "12", "--beam", "16", "--seed", "0",
                 "--emit-marks", "marks.txt"], tmp_path)
    assert r.returncode == 0
    text = (tmp_path / "marks.txt").read_text().splitlines()
    assert text[0].startswith("# word=")
    assert set(text[1:]) <= {"0", "1"}
    r = run_cli(["generate", "--family", "marks", "--marks-file", "marks.txt",
                 "--depth", "6", "--out", "mt.txt"], tmp_path)
    assert r.returncode == 0


def test_outdir_env_var(tmp_path):
    sub = tmp_path / "results"
    sub.mkdir()
    r = run_cli(["generate", "--family", "path", "--depth", "4", "--out", "p.txt"],
                tmp_path, env={"IBNTREES_OUTDIR": str(sub)})
    assert r.returncode == 0
    assert (sub / "p.txt").exists()


def test_report_merges_and_skips(tmp_path):
    run_cli(["estimate-ibn", "--family", "seq", "--grid", "0.4:0.6:0.1",
             "--schedule", "16,64", "--seed", "3", "--out", "i.csv"], tmp_path)
    run_cli(["firefight", "--family", "seq", "--k", "2", "--gamma-grid", "0.6,0.8",
             "--schedule", "8,16,32", "--seed", "3", "--out", "f.csv"], tmp_path)
    (tmp_path / "broken.manifest.json").write_text("{not json")
    r = run_cli(["report", ".", "--out", "summary.csv"], tmp_path)
    assert r.returncode == 0
    assert "skipped" in r.stderr
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0].startswith("family,seed")
    seq_rows = [l for l in lines if l.startswith("seq,3")]
    assert len(seq_rows) == 1
    fields = dict(zip(lines[0].split(","), seq_rows[0].split(",")))
    assert fields["ibn_lower"] != "" and fields["lambdac_upper"] != ""


def test_report_empty_dir(tmp_path):
    r = run_cli(["report", "."], tmp_path)
    assert r.returncode == 0


def test_threads_flag_identical_output(tmp_path):
    base = ["estimate-ibn", "--family", "binary", "--grid", "0.2:0.8:0.2",
            "--schedule", "8,16"]
    run_cli(base + ["--out", "s1.csv"], tmp_path)
    run_cli(base + ["--threads", "4", "--out", "s4.csv"], tmp_path)
    assert (tmp_path / "s1.csv").read_bytes() == (tmp_path / "s4.csv").read_bytes()
