import csv
import io
import json

import pytest

from lazyshuffle.cli import main

CHECK_FOR = {
    "u2": "pair:1,2",
    "hypercube": "strong1",
    "strong1": "strong1",
    "reach2": "reach",
    "division": "division",
    "strong2": "strong2",
}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def build(capsys, tmp_path, family, n, *extra):
    path = tmp_path / f"{family}_{n}.json"
    code, out, _ = run(capsys, "build", family, "--n", n, "--out", path, *extra)
    assert code == 0
    return path, json.loads(out)


def test_build_examples(capsys, tmp_path):
    _, info = build(capsys, tmp_path, "strong1", 8)
    assert info["length"] == 12
    _, info = build(capsys, tmp_path, "u2", 10)
    assert info["length"] == 17 and info["paper_bound"] == 17
    code, out, err = run(capsys, "build", "division", "--n", 3, "--out", tmp_path / "x.json")
    assert code == 1 and out == "" and "requires even n" in err


def test_build_default_names(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, "build", "reach2", "--n", 6)[0] == 0
    assert (tmp_path / "reach2_6.reach.json").exists()
    assert run(capsys, "build", "ktuple:3", "--n", 5)[0] == 0
    assert (tmp_path / "ktuple3_5.shuffle.json").exists()
    code, _, err = run(capsys, "build", "ktuple", "--n", 5)
    assert code == 1 and "--k" in err
    assert run(capsys, "build", "bogus", "--n", 5)[0] == 1
    assert run(capsys, "build", "hypercube", "--n", 6)[0] == 1


def test_verify_examples(capsys, tmp_path):
    path, _ = build(capsys, tmp_path, "strong2", 16)
    code, out, _ = run(capsys, "verify", "strong2", path, "--tol", "1e-9")
    assert code == 0 and json.loads(out)["pass"] is True
    path, _ = build(capsys, tmp_path, "hypercube", 4)
    code, out, _ = run(capsys, "verify", "division", path)
    assert code == 2 and json.loads(out)["pass"] is False
    path, _ = build(capsys, tmp_path, "reach2", 6)
    assert run(capsys, "verify", "reach", path)[0] == 0


def test_verify_usage_errors(capsys, tmp_path):
    path, _ = build(capsys, tmp_path, "u2", 5)
    assert run(capsys, "verify", "bogus", path)[0] == 1
    assert run(capsys, "verify", "pair:1,1", path)[0] == 1
    assert run(capsys, "verify", "pair:x", path)[0] == 1
    assert run(capsys, "verify", "division", path)[0] == 1  # odd n
    assert run(capsys, "verify", "strong1", tmp_path / "missing.json")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"convention": "execution-order", "n": 2, "swaps": [{"a": 1, "b": 1, "p": {"rat": {"num": "1", "den": "2"}}}]}')
    assert run(capsys, "verify", "strong1", bad)[0] == 1
    seq, _ = build(capsys, tmp_path, "reach2", 4)
    assert run(capsys, "verify", "strong1", seq)[0] == 1
    assert run(capsys, "verify")[0] == 1


def test_verify_pair_and_full(capsys, tmp_path):
    path, _ = build(capsys, tmp_path, "u2", 5)
    assert run(capsys, "verify", "pair:1,2", path)[0] == 0
    assert run(capsys, "verify", "pair:2,3", path)[0] == 2
    path, _ = build(capsys, tmp_path, "ktuple:4", 4)
    assert run(capsys, "verify", "full", path)[0] == 0


def test_certify_examples(capsys, tmp_path):
    path, _ = build(capsys, tmp_path, "u2", 8)
    code, out, _ = run(capsys, "certify", "rank", path)
    doc = json.loads(out)
    assert code == 0 and doc["endpoints"] == {"start": 3, "end": 16} and doc["implied_lower_bound"] == 13
    path, _ = build(capsys, tmp_path, "hypercube", 8)
    code, out, _ = run(capsys, "certify", "transversal", path)
    assert code == 0 and json.loads(out)["implied_lower_bound"] == 12
    path, _ = build(capsys, tmp_path, "reach2", 4)
    code, out, _ = run(capsys, "certify", "clique", path)
    doc = json.loads(out)
    assert code == 0 and doc["endpoints"] == {"start": 2, "end": 6} and doc["implied_lower_bound"] == 4


def test_certify_rank_refuses_surds(capsys, tmp_path):
    path, _ = build(capsys, tmp_path, "division", 8)
    code, out, err = run(capsys, "certify", "rank", path)
    assert code == 1 and out == "" and "surd" in err


def test_search_command(capsys):
    code, out, _ = run(capsys, "search", "--n", 4)
    assert code == 0 and json.loads(out)["verdict"] == "minimal"
    code, out, _ = run(capsys, "search", "--n", 4, "--length", 4)
    assert code == 0 and json.loads(out)["verdict"] == "found"
    code, out, _ = run(capsys, "search", "--n", 6, "--length", 6, "--max-nodes", 10)
    assert code == 2 and json.loads(out)["verdict"] == "inconclusive"
    assert run(capsys, "search", "--n", 9)[0] == 1


def test_table_max_16(capsys, tmp_path):
    out_path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--max-n", 16, "--out", out_path)
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert list(rows[0]) == ["family", "n", "length", "paper_bound", "verdict"]
    assert {r["family"] for r in rows} == {"u2", "strong1", "reach2", "division", "strong2"}
    assert len(rows) == 4 * 15 + 8
    assert all(r["verdict"] == "pass" for r in rows)
    u2 = next(r for r in rows if r["family"] == "u2" and r["n"] == "16")
    assert (u2["length"], u2["paper_bound"]) == ("29", "29")
    s2 = next(r for r in rows if r["family"] == "strong2" and r["n"] == "16")
    assert int(s2["length"]) <= 1024 and float(s2["paper_bound"]) == 1024
    # deterministic output
    code, out, _ = run(capsys, "table", "--max-n", 16)
    assert out == out_path.read_text()


def test_table_guard(capsys):
    assert run(capsys, "table", "--max-n", 65)[0] == 1


def test_global_flags(capsys, tmp_path):
    path, _ = build(capsys, tmp_path, "division", 8)
    code, out, _ = run(capsys, "--precision-bits", 200, "--jobs", 2, "verify", "division", path)
    assert code == 0 and json.loads(out)["max_interval_width"] < 1e-12
    assert run(capsys, "--precision-bits", 10, "verify", "division", path)[0] == 1
    assert run(capsys, "--jobs", 0, "verify", "division", path)[0] == 1


def test_help_documents_formats(capsys):
    assert run(capsys, "--help")[0] == 0


@pytest.mark.parametrize("family", list(CHECK_FOR))
def test_build_then_verify_every_n(capsys, tmp_path, family):
    for n in range(1, 65):
        if family in ("u2", "reach2", "division") and n < 2:
            continue
        if family == "division" and n % 2:
            continue
        if family == "hypercube" and n & (n - 1):
            continue
        path, info = build(capsys, tmp_path, family, n)
        assert info["within_bound"]
        checks = [CHECK_FOR[family]] + (["strong1"] if family == "division" else [])
        for check in checks:
            code, out, _ = run(capsys, "verify", check, path)
            assert code == 0, (family, n, check, out)


def test_build_then_verify_ktuple(capsys, tmp_path):
    for n in range(2, 65):
        path, _ = build(capsys, tmp_path, f"ktuple:2", n)
        assert run(capsys, "verify", f"pair:{n - 1},{n}", path)[0] == 0
    for n in range(1, 8):
        path, _ = build(capsys, tmp_path, "ktuple", n, "--k", n)
        assert run(capsys, "verify", "full", path)[0] == 0
