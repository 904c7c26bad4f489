import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from eccsum import io
from eccsum.cli import run


@pytest.fixture
def call(capsys):
    def _call(*argv):
        code = run([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err

    return _call


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def gen(call, tmp_path, kind, n):
    path = tmp_path / f"{kind}{n}.json"
    code, _, _ = call("gen", kind, "--n", n, "--output", path)
    assert code == 0
    return path


@pytest.fixture
def discrete4(tmp_path):
    ids = ["X1", "X2", "X3", "X4"]
    return write(tmp_path, "d4.json", {"points": ids, "d": (1 - np.eye(4)).tolist()})


@pytest.mark.parametrize("kind", ["sequence", "two-apex", "circle", "path"])
def test_gen_round_trip(call, tmp_path, kind):
    path = gen(call, tmp_path, kind, 5)
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, io.GRAPH_SCHEMA)
    g = io.graph_from_json(doc)
    assert g.n >= 5
    code, out, _ = call("graph", "qp", path)
    assert code == 0
    sp = tmp_path / "sp.json"
    res = json.loads(out)
    sp.write_text(json.dumps({"points": res["vertices"], "d": res["matrix"]}))
    assert call("validate", sp)[0] == 0


def test_circle_center_row(call, tmp_path):
    path = gen(call, tmp_path, "circle", 8)
    code, out, _ = call("graph", "qp", path)
    res = json.loads(out)
    c = res["vertices"].index("v0")
    row = [x for i, x in enumerate(res["matrix"][c]) if i != c]
    assert code == 0 and row == pytest.approx([1.0] * 8)


def test_validate_triangle_violation(call, tmp_path):
    path = write(tmp_path, "bad.json",
                 {"points": ["a", "b", "c"], "d": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]})
    code, out, _ = call("validate", path)
    rep = json.loads(out)
    assert code == 1 and not rep["valid"]
    assert ["a", "b", "c"] in [v["witness"] for v in rep["violations"] if v["axiom"] == "triangle"]


def test_validate_discrete_ok(call, discrete4):
    code, out, _ = call("validate", discrete4)
    assert code == 0 and json.loads(out)["valid"]


def test_ecc_pseudo_json_and_csv(call, tmp_path):
    path = write(tmp_path, "line.json", {"points": ["m", "o", "p"],
                                         "d": [[0, 0.5, 1], [0.5, 0, 0.5], [1, 0.5, 0]]})
    code, out, _ = call("ecc-pseudo", path, "--subset", "o")
    res = json.loads(out)
    assert code == 0 and res["matrix"][0][2] == 0.0
    code, out, _ = call("ecc-pseudo", path, "--format", "csv")
    ids, vals = io.matrix_from_csv(out)
    assert ids == ["m", "o", "p"] and vals[0, 2] == 1.0


def test_seqdist(call, tmp_path, discrete4):
    seq = write(tmp_path, "seq.json", {"pairs": [["X1", "X2"], ["X3", "X4"]], "weights": [0.5, 0.5]})
    code, out, _ = call("seqdist", discrete4, seq)
    res = json.loads(out)
    assert code == 0
    assert res["d_ac"] == pytest.approx(1.0)
    assert res["d_cc"]["value"] == pytest.approx(0.5)
    assert res["d_wc"]["value"] == pytest.approx(1.0) and res["d_wc"]["method"] == "exact"
    code, out, _ = call("seqdist", discrete4, seq, "--p", 2, "--mode", "bracket", "--seed", 4)
    res = json.loads(out)
    assert res["d_wc"]["lower"] <= res["d_wc"]["upper"] + 1e-12
    assert call("seqdist", discrete4, seq, "--p", 2, "--mode", "exact")[0] == 2


def test_ae_norm(call, tmp_path, discrete4):
    mol = write(tmp_path, "m.json", {"coefficients": {"X1": 0.5, "X2": -0.5, "X3": 0.5, "X4": -0.5}})
    code, out, _ = call("ae-norm", discrete4, mol)
    assert code == 0 and json.loads(out)["norm"] == pytest.approx(1.0)
    bad = write(tmp_path, "b.json", {"coefficients": {"X1": 1.0}})
    code, _, err = call("ae-norm", discrete4, bad)
    assert code == 2 and "sum" in err


def apex_files(call, tmp_path, equal):
    path = gen(call, tmp_path, "two-apex", 4)
    g = io.graph_from_json(json.loads(path.read_text()))
    vals = {v: float(i) for i, v in enumerate(g.vertices)}
    if equal:
        vals["v2"] = vals["v1"]
    idx = write(tmp_path, "f.json", {"values": vals})
    core = ",".join(v for v in g.vertices if v not in ("v1", "v2"))
    return path, idx, core


def test_pietsch_infinite_on_apexes(call, tmp_path):
    path, idx, core = apex_files(call, tmp_path, equal=False)
    code, out, _ = call("pietsch", path, "--function", idx, "--subset", core)
    cert = json.loads(out)
    jsonschema.validate(cert, io.CERTIFICATE_SCHEMA)
    assert code == 0 and cert["constant"] == "inf" and cert["witness_pair"] == ["v1", "v2"]
    code, _, _ = call("pietsch", path, "--function", idx, "--subset", core, "--require-finite")
    assert code == 1


def test_pietsch_finite_on_apexes(call, tmp_path):
    path, idx, core = apex_files(call, tmp_path, equal=True)
    code, out, _ = call("pietsch", path, "--function", idx, "--subset", core, "--p", 2,
                        "--require-finite")
    cert = json.loads(out)
    jsonschema.validate(cert, io.CERTIFICATE_SCHEMA)
    assert code == 0 and isinstance(cert["constant"], float)
    assert sum(cert["measure"].values()) == pytest.approx(1.0)
    assert min(s["value"] for s in cert["slack"]) >= -1e-9


def test_pietsch_map_and_approx(call, tmp_path, discrete4):
    ident = write(tmp_path, "id.json", {"mapping": {x: x for x in ["X1", "X2", "X3", "X4"]}})
    code, out, _ = call("pietsch", discrete4, "--map", ident)
    cert = json.loads(out)
    jsonschema.validate(cert, io.CERTIFICATE_SCHEMA)
    assert code == 0 and cert["mode"] == "map"
    code, out, _ = call("approx", discrete4, discrete4, ident, "--p", 2,
                        "--mix", "X1=0.5,X2=0.5")
    res = json.loads(out)
    assert code == 0 and res["constant"] <= 1 + 1e-9
    assert res["mixed_excess"] <= 1e-9
    for cert in res["per_point"].values():
        jsonschema.validate(cert, io.CERTIFICATE_SCHEMA)


def test_graph_subcommands(call, tmp_path):
    path = gen(call, tmp_path, "path", 5)
    disc = write(tmp_path, "disc.json",
                 {"points": ["1", "2", "3", "4", "5"], "d": (1 - np.eye(5)).tolist()})
    code, out, _ = call("graph", "dp", path, "--metric", disc, "--p", 2, "--query", "1,5")
    res = json.loads(out)
    assert code == 0 and res["matrix"][0][4] == pytest.approx(2.0)
    assert res["paths"][0]["path"] == ["1", "2", "3", "4", "5"]
    code, out, _ = call("graph", "dpmu", path, "--measure", "1=1", "--p", 1)
    assert code == 0 and json.loads(out)["matrix"][0][4] == pytest.approx(4.0)
    idx = write(tmp_path, "f.json", {"values": {"1": 0, "2": 0, "3": 1, "4": 1, "5": 1}})
    code, out, _ = call("graph", "ep", path, "--index", idx, "--format", "csv")
    ids, vals = io.matrix_from_csv(out)
    assert code == 0 and vals[0, 4] == 1.0 and vals[2, 4] == 0.0
    assert call("graph", "ep", path)[0] == 2
    assert call("graph", "qp", path, "--query", "1,9")[0] == 2


def test_symmetry_circle(call, tmp_path):
    path = gen(call, tmp_path, "circle", 16)
    meas = write(tmp_path, "mu.json", {"measure": {"v0": 1.0}})
    code, out, _ = call("symmetry", path, "--measure", meas, "--p", 2)
    res = json.loads(out)
    assert code == 0
    assert sorted(map(len, res["classes"])) == [1, 16]


def test_check_t2(call, tmp_path):
    path = gen(call, tmp_path, "sequence", 4)
    g = io.graph_from_json(json.loads(path.read_text()))
    idx = write(tmp_path, "f.json", {"values": {v: float(i % 2) for i, v in enumerate(g.vertices)}})
    code, out, _ = call("check-t2", path, "--index", idx, "--p", 2)
    res = json.loads(out)
    assert code == 0 and res["passed"] and res["part2"] is not None
    jsonschema.validate(res["certificate"], io.CERTIFICATE_SCHEMA)


def test_usage_errors(call, tmp_path, discrete4):
    assert call()[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("validate", discrete4, "--bogus")[0] == 2
    assert call("gen", "circle")[0] == 2
    assert call("validate", tmp_path / "missing.json")[0] == 2


def test_schema_errors_are_path_annotated(call, tmp_path):
    bad = write(tmp_path, "bad.json", {"points": ["a", "b"], "d": [[0, "x"], [1, 0]]})
    code, _, err = call("validate", bad)
    assert code == 2 and "$.d[0][1]" in err
    g = write(tmp_path, "g.json", {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "w": -1}]})
    code, _, err = call("graph", "qp", g)
    assert code == 2 and "$.edges[0].w" in err
    notjson = tmp_path / "nj.json"
    notjson.write_text("{oops")
    code, _, err = call("validate", notjson)
    assert code == 2 and "invalid JSON" in err


def test_unknown_ids_rejected(call, tmp_path, discrete4):
    seq = write(tmp_path, "seq.json", {"pairs": [["X1", "Q"]]})
    code, _, err = call("seqdist", discrete4, seq)
    assert code == 2 and "$.pairs[0][1]" in err
    assert call("ecc-pseudo", discrete4, "--subset", "Z")[0] == 2


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "eccsum.cli", "gen", "sequence", "--n", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)["vertices"]) == 4
