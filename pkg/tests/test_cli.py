import csv
import io
import json
from fractions import Fraction

import pytest

from treewass import build_tree, identity_embedding
from treewass.cli import main
from treewass.io import embedding_to_json, tree_to_json


def dump(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    path = {"root": "0", "edges": [{"u": "0", "v": "1", "w": 1}, {"u": "1", "v": "2", "w": 2}]}
    star = {"root": "r", "edges": [{"u": "r", "v": x, "w": w} for x, w in (("a", 1), ("b", 2), ("c", 3))]}
    return {
        "path": dump(tmp_path / "path.json", path),
        "d0": dump(tmp_path / "d0.json", {"masses": {"0": 1}}),
        "d2": dump(tmp_path / "d2.json", {"masses": {"2": 1}}),
        "star": dump(tmp_path / "star.json", star),
        "smu": dump(tmp_path / "smu.json", {"masses": {"a": 0.5, "b": 0.5}}),
        "snu": dump(tmp_path / "snu.json", {"masses": {"c": 1}}),
        "root": dump(tmp_path / "root.json", {"masses": {"r": 1}}),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_dist_examples(capsys, files):
    code, rep = report(capsys, "dist", files["path"], files["d0"], files["d2"])
    assert code == 0 and rep["outputs"]["wasserstein"] == 3
    code, rep = report(capsys, "dist", files["path"], files["d0"], files["d0"])
    assert rep["outputs"]["wasserstein"] == 0
    code, rep = report(capsys, "dist", files["star"], files["smu"], files["snu"], "--check-oracle")
    assert code == 0 and rep["outputs"]["wasserstein"] == 4.5 and rep["outputs"]["oracle_delta"] == 0
    code, rep = report(capsys, "dist", files["star"], files["smu"], files["snu"], "--check-oracle", "--exact")
    assert rep["outputs"]["wasserstein"] == "9/2" and rep["outputs"]["oracle_delta"] == "0"


def test_report_fields(capsys, files):
    _, rep = report(capsys, "dist", files["path"], files["d0"], files["d2"])
    assert rep["command"] == "dist" and rep["version"]
    assert set(rep["inputs"]) == {files["path"], files["d0"], files["d2"]}
    assert all(len(h) == 64 for h in rep["inputs"].values())
    assert "tree_wasserstein" in rep["timings"]


def test_dist_bad_input(capsys, files, tmp_path):
    bad = dump(tmp_path / "bad.json", {"masses": {"9": 1}})
    code, out, err = run(capsys, "dist", files["path"], files["d0"], bad)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "UnknownVertex"
    code, _, err = run(capsys, "dist", files["path"], files["d0"], str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in err


def test_coupling_outputs(capsys, files, tmp_path):
    out = tmp_path / "c.json"
    code, rep = report(capsys, "coupling", files["star"], files["smu"], files["snu"], "--out", str(out), "--exact")
    assert code == 0 and rep["outputs"]["cost"] == "9/2" and rep["outputs"]["marginals"] == "PASS"
    c = json.loads(out.read_text())
    assert c["cost"] == "9/2"
    assert {(e["from"], e["to"], e["mass"]) for e in c["entries"]} == {("a", "c", "1/2"), ("b", "c", "1/2")}
    code, rep = report(capsys, "coupling", files["path"], files["d0"], files["d0"])
    assert rep["outputs"]["cost"] == 0
    code, rep = report(capsys, "coupling", files["path"], files["d0"], files["d2"])
    assert rep["outputs"]["cost"] == 3


def test_embed_root_is_empty(capsys, files, tmp_path):
    out = tmp_path / "v.json"
    code, rep = report(capsys, "embed", files["star"], files["root"], "--out", str(out))
    assert code == 0 and rep["outputs"]["nonzeros"] == 0
    assert json.loads(out.read_text()) == {"entries": {}}
    _, rep = report(capsys, "embed", files["star"], files["smu"])
    assert rep["outputs"]["vector"] == {"entries": {"a": 0.5, "b": 1.0}}


def test_frt_one_point(capsys, tmp_path):
    src = tmp_path / "one.csv"
    src.write_text("0\n")
    out = tmp_path / "e.json"
    code, rep = report(capsys, "frt", str(src), "--kind", "matrix", "--seed", "1", "--count", "1", "--out", str(out))
    assert code == 0 and rep["outputs"]["vertices"] == [1] and rep["seed"] == 1
    e = json.loads(out.read_text())
    assert e["components"][0]["tree"]["edges"] == []


def test_frt_then_audit(capsys, tmp_path):
    src = tmp_path / "pts.csv"
    src.write_text("\n".join(f"{i % 3},{i // 3}" for i in range(9)) + "\n")
    out = tmp_path / "e.json"
    code, rep = report(capsys, "frt", str(src), "--seed", "5", "--count", "4", "--out", str(out))
    assert code == 0 and rep["outputs"]["min_ratio"] >= 1
    code, rep = report(capsys, "audit", str(out), "--pairs", "10", "--seed", "2")
    assert code == 0 and rep["outputs"]["verdict"] == "PASS"
    assert rep["outputs"]["max_ratio"] <= rep["outputs"]["point_distortion"] * (1 + 1e-9)


def test_frt_records_seed_when_missing(capsys, tmp_path):
    src = tmp_path / "d.csv"
    src.write_text("0,1\n1,0\n")
    _, rep = report(capsys, "frt", str(src))
    assert isinstance(rep["seed"], int)


def test_audit_identity(capsys, tmp_path):
    t = build_tree([("r", "a", Fraction(1)), ("r", "b", Fraction(2)), ("a", "c", Fraction(1, 2))], "r")
    path = dump(tmp_path / "id.json", embedding_to_json(identity_embedding(t)))
    code, rep = report(capsys, "audit", path, "--pairs", "20", "--seed", "0", "--exact")
    assert code == 0
    assert rep["outputs"]["min_ratio"] == rep["outputs"]["max_ratio"] == "1"
    assert rep["outputs"]["verdict"] == "PASS"


def test_audit_detects_contraction(capsys, tmp_path):
    e = {
        "components": [{"p": 1, "tree": {"root": "u", "edges": [{"u": "u", "v": "v", "w": 0.5}]}, "f": {"0": "u", "1": "v"}}],
        "source": {"labels": ["0", "1"], "dist": [[0, 1], [1, 0]]},
    }
    code, _, err = run(capsys, "audit", dump(tmp_path / "bad.json", e), "--seed", "0")
    assert code == 2 and json.loads(err)["error"] == "NonContractionViolated"


def bench_rows(capsys, *argv):
    code, out, _ = run(capsys, "bench", *argv)
    return code, list(csv.DictReader(io.StringIO(out)))


def test_bench_small(capsys):
    code, rows = bench_rows(capsys, "--vertices", "3", "50", "--seed", "4", "--repeat", "1")
    assert code == 0 and [r["vertices"] for r in rows] == ["3", "50"]
    for r in rows:
        assert float(r["oracle_delta"]) <= 1e-8 * max(1, float(r["value"]))
        assert float(r["coupling_cost"]) == pytest.approx(float(r["value"]), rel=1e-9)


def test_bench_rejects_one_vertex(capsys):
    code, out, err = run(capsys, "bench", "--vertices", "1")
    assert code == 2 and "at least 2" in err


def test_bench_exact_rerun_is_bit_exact(capsys):
    a = bench_rows(capsys, "--vertices", "30", "--seed", "11", "--exact", "--repeat", "0")[1]
    b = bench_rows(capsys, "--vertices", "30", "--seed", "11", "--exact", "--repeat", "0")[1]
    assert a[0]["value"] == b[0]["value"]
    assert Fraction(a[0]["value"]) > 0
    assert a[0]["oracle_delta"] == "0"


def test_frt_rerun_is_identical(capsys, tmp_path):
    src = tmp_path / "pts.csv"
    src.write_text("0,0\n1,0\n0,2\n3,3\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"e{k}.json"
        run(capsys, "frt", str(src), "--seed", "77", "--count", "5", "--out", str(out))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_tree_json_from_library_is_cli_readable(capsys, tmp_path):
    t = build_tree([(0, 1, 2.5), (0, 2, 1.0)], 0)
    tp = dump(tmp_path / "t.json", tree_to_json(t))
    mu = dump(tmp_path / "mu.json", {"masses": {"1": 1}})
    nu = dump(tmp_path / "nu.json", {"masses": {"2": 1}})
    _, rep = report(capsys, "dist", tp, mu, nu)
    assert rep["outputs"]["wasserstein"] == 3.5
