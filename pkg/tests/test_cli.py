import json

import pytest

from flopdt.cli import main
from flopdt.serialize import series_from_json
from flopdt.series import compare_series

GEOMETRY = """
order = "3"
[geometry]
l = 2
n = [1, 1]
p_dot_c = 1
"""


@pytest.fixture
def geo(tmp_path):
    path = tmp_path / "geo.toml"
    path.write_text(GEOMETRY)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_eta_json(capsys):
    code, out, _ = run(["expand", "eta", "--order", "2"], capsys)
    assert code == 0
    s, _ = series_from_json(out)
    assert len(s) == 2


@pytest.mark.parametrize("obj", ["theta", "theta-a", "fn", "blowup-error"])
def test_expand_objects(obj, capsys):
    code, out, _ = run(["expand", obj, "--order", "2", "--format", "csv"], capsys)
    assert code == 0 and out.startswith("q,")


def test_expand_error_term_needs_geometry(geo, capsys):
    code, _, err = run(["expand", "error"], capsys)
    assert code == 2 and "--config" in err
    code, out, _ = run(["expand", "error", "--config", geo, "--format", "table"], capsys)
    assert code == 0 and "coefficient" in out


def test_flop_round_trip_and_determinism(geo, tmp_path, capsys):
    run(["expand", "theta", "--order", "2", "--output", str(tmp_path / "theta.json")], capsys)
    # re-grade the theta series onto the source side of the configured flop
    doc = json.loads((tmp_path / "theta.json").read_text())
    doc["grading_weights"]["t"] = ["1/4"]
    doc["valid_to"] = "2/1"
    doc["terms"] = [t for t in doc["terms"] if t[0] / 24 + t[1][0] / 8 <= 2]
    src = tmp_path / "in.json"
    src.write_text(json.dumps(doc))
    outs = []
    for name in ("a.json", "b.json"):
        code, _, _ = run(["flop", "--config", geo, "--input", str(src), "--output", str(tmp_path / name)], capsys)
        assert code == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    code, _, _ = run(["flop", "--config", geo, "--inverse", "--input", str(tmp_path / "a.json"), "--output", str(tmp_path / "back.json")], capsys)
    assert code == 0
    back, _ = series_from_json((tmp_path / "back.json").read_text())
    orig, _ = series_from_json(src.read_text())
    cmp = compare_series(back, orig)
    assert cmp and cmp.compared > 0


def test_flop_wrong_side(geo, tmp_path, capsys):
    run(["expand", "theta", "--order", "2", "--output", str(tmp_path / "t.json")], capsys)
    code, _, err = run(["flop", "--config", geo, "--input", str(tmp_path / "t.json")], capsys)
    assert code == 2 and "side" in err


def test_blowup_cells(tmp_path, capsys):
    src = tmp_path / "one.json"
    src.write_text(json.dumps({
        "q_denominator": 24, "t_denominator": 2, "lattice_rank": 0, "cyclotomic_order": 1,
        "grading_weights": {"q": "1/1", "t": []}, "valid_to": "4/1", "terms": [[0, [], ["1/1"]]],
    }))
    code, out, _ = run(["blowup", "--rank", "2", "--input", str(src), "--order", "2", "--cells", "1", "1"], capsys)
    assert code == 0
    cells = {(a, s): v for a, s, v in json.loads(out)["cells"]}
    assert cells[(0, "0/1")] == "1/1" and cells[(-1, "1/2")] == "2/1"


def test_invariants(geo, capsys):
    code, out, _ = run(["invariants", "--config", geo], capsys)
    doc = json.loads(out)
    table = {(n, m): v for n, m, v in doc["n_invariants"]}
    assert code == 0
    assert table[(0, 1)] == "1/1" and table[(0, 2)] == "5/4" and table[(1, 2)] == "1/1"
    assert doc["par"][0]["mu"] == "0/1"


def test_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("l = 7\nn = [1,1,1,1,1,1,1]\n")
    code, _, err = run(["invariants", "--config", str(bad)], capsys)
    assert code == 2 and "l:" in err
    bad.write_text("l = 2\nn = [1, 1]\n")
    code, _, err = run(["invariants", "--config", str(bad), "--variant", "euler"], capsys)
    assert code == 2 and "euler" in err
    bad.write_text('l = 1\nn = [1]\n[grading]\nw_c = "-2"\n')
    code, _, err = run(["expand", "error", "--config", str(bad)], capsys)
    assert code == 3 and "ChamberError" in err
    code, _, err = run(["blowup", "--rank", "2", "--input", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_check_subset_is_deterministic(capsys):
    argv = ["check", "--suite", "triple_product", "--suite", "multiple_cover", "--seed", "3"]
    code, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert code == 0 and first == second
    doc = json.loads(first)
    assert doc["passed"] and [s["name"] for s in doc["suites"]] == ["triple_product", "multiple_cover"]
