import json
import os
import subprocess
import sys

import pytest

from steiner_degree.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    paths = {}
    for name, argv in {
        "hs": ["hitting-set-star", "--sets", "[[1,2],[2,3]]"],
        "tree": ["random-tree", "--n", "25", "--groups", "4", "--group-size", "3", "--seed", "42"],
        "tw": ["bounded-tw", "--n", "14", "--w", "2", "--seed", "7"],
        "kt": ["bounded-tw", "--n", "10", "--w", "2", "--k", "4", "--terminal-count", "7", "--seed", "3"],
    }.items():
        p = tmp_path / f"{name}.json"
        assert run(capsys, "gen", *argv, "--out", str(p))[0] == 0
        paths[name] = str(p)
    return paths


def test_gen_star(capsys):
    code, out, _ = run(capsys, "gen", "star", "--leaves", "4")
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 5 and len(doc["edges"]) == 4


def test_gen_deterministic(capsys):
    a = run(capsys, "gen", "bounded-tw", "--w", "2", "--n", "14", "--seed", "7")[1]
    b = run(capsys, "gen", "bounded-tw", "--w", "2", "--n", "14", "--seed", "7")[1]
    assert a == b


def test_gen_hitting_set_fixture(capsys):
    doc = json.loads(run(capsys, "gen", "hitting-set-star", "--sets", "[[1,2],[2,3]]")[1])
    assert doc["root"] == 0 and doc["groups"] == [[1, 2], [2, 3]] and doc["n"] == 4


def test_gen_bad_params(capsys):
    assert run(capsys, "gen", "hitting-set-star")[0] == 1


def test_oracle_hitting_set(capsys, files):
    code, out, _ = run(capsys, "oracle", files["hs"])
    assert code == 0 and json.loads(out)["result"]["objective"] == 1


def test_solve_tree_deterministic(capsys, files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "solve-tree", files["tree"], "--seed", "42", "--out", str(a))[0] == 0
    assert run(capsys, "solve-tree", files["tree"], "--seed", "42", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["config"]["seed"] == 42 and doc["result"]["feasible"]


def test_solve_tree_flags(capsys, files, tmp_path):
    lp = tmp_path / "m.lp"
    code, out, _ = run(capsys, "solve-tree", files["tree"], "--cover-threshold", "2", "--iter-cap", "500",
                       "--dump-lp", str(lp), "--format", "csv")
    assert code == 0 and out.startswith("node,degree,bound,ratio,groups")
    assert "Subject To" in lp.read_text()
    code, out, _ = run(capsys, "solve-tree", files["tree"], "--objective", "md", "--root", "0")
    assert code == 0 and json.loads(out)["result"]["feasible"]


def test_exit_code_infeasible(capsys, tmp_path):
    p = tmp_path / "inf.json"
    p.write_text(json.dumps({"n": 4, "edges": [[0, 1], [0, 2], [0, 3]], "root": 0,
                             "groups": [[1], [2], [3]], "bounds": [2, 1, 1, 1]}))
    assert run(capsys, "solve-tree", str(p))[0] == 2
    assert run(capsys, "oracle", str(p), "--min-cost")[0] == 2


def test_exit_code_cap(capsys, tmp_path):
    p = tmp_path / "tri.json"
    # pairwise groups on a 3-leaf star: the unique LP optimum is x = 1/2 on every edge,
    # so a single pass covers all groups only half the time
    p.write_text(json.dumps({"n": 4, "edges": [[0, 1], [0, 2], [0, 3]], "root": 0,
                             "groups": [[1, 2], [2, 3], [1, 3]], "bounds": [3, 1, 1, 1]}))
    codes = [run(capsys, "solve-tree", str(p), "--iter-cap", "1", "--seed", str(s))[0] for s in range(20)]
    assert set(codes) == {0, 3}


def test_invalid_instance(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2]], "groups": [[9]]}))
    code, _, err = run(capsys, "solve-tree", str(p))
    assert code == 1 and "node out of range" in err
    assert run(capsys, "solve-tree", str(tmp_path / "missing.json"))[0] == 1


def test_btw_and_dot(capsys, files, tmp_path):
    dot = tmp_path / "s.dot"
    code, out, _ = run(capsys, "btw", files["tw"], "--w", "2", "--dot", str(dot), "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["feasible"] and doc["result"]["width"] == 2
    assert dot.read_text().startswith("graph separator_tree")


def test_ktree_modes(capsys, files):
    code, out, _ = run(capsys, "ktree", files["kt"], "--seed", "5")
    doc = json.loads(out)
    assert code == 0 and len(doc["result"]["terminals"]) >= 4
    code, out, _ = run(capsys, "ktree", files["kt"], "--mode", "derandomized", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "round,a,b,full_bins,degree,terminals"


def test_stats(capsys, files):
    code, out, _ = run(capsys, "stats", files["tree"], "--trials", "500")
    res = json.loads(out)["result"]
    assert code == 0 and len(res["group_connect_prob"]) == 4
    assert {c["case"] for c in res["concentration"]} <= {"high", "mid", "low"}


def test_bench(capsys, tmp_path):
    out = tmp_path / "b.json"
    code, _, err = run(capsys, "bench", "--suite", "theorem3", "--runs", "3", "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and "mean_cost_ratio" in doc["result"]["theorem3"]["summary"]
    assert "max_degree_ratio" in err and "mean_cost_ratio" in err


def test_timing_flag(capsys, files):
    doc = json.loads(run(capsys, "oracle", files["hs"], "--timing")[1])
    assert "wall_time_s" in doc


def test_entry_point_and_thread_env(files, tmp_path):
    env = dict(os.environ, STEINER_DEGREE_THREADS="2")
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "steiner_degree.cli", "bench", "--suite", "separator",
                        "--runs", "6", "--out", str(p)], check=True, env=env if i else os.environ,
                       capture_output=True)
        outs.append(p.read_bytes())
    # serial and pooled execution agree byte for byte
    assert outs[0] == outs[1]
    bad = dict(os.environ, STEINER_DEGREE_THREADS="many")
    r = subprocess.run([sys.executable, "-m", "steiner_degree.cli", "bench", "--suite", "twopoint", "--runs", "1"],
                       env=bad, capture_output=True)
    assert r.returncode == 1
