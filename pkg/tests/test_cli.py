import json

import pytest

from ruledfib.cli import parse_types, run
from ruledfib.config import curve_from_config, load_config
from ruledfib.errors import InvalidInput, NeedsFieldExtension

F5 = {"field": {"p": 5, "k": 1}, "a4": 1, "a6": 2, "points": {"P": {"order": 4}, "Q": None}}
F2_TOML = 'field = { p = 2, k = 1 }\na1 = 1\na2 = 1\na6 = 1\n[points]\nQ = [0, 1]\n'


@pytest.fixture
def files(tmp_path):
    f5 = tmp_path / "f5.json"
    f5.write_text(json.dumps(F5))
    f2 = tmp_path / "f2.toml"
    f2.write_text(F2_TOML)
    return {"f5": str(f5), "f2": str(f2), "dir": tmp_path}


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sym_split(capsys):
    code, out, _ = call(capsys, "sym-split", "--p", "2", "--mode", "supersingular", "--format", "text")
    assert code == 0 and out.strip() == "PASS"
    code, out, _ = call(capsys, "sym-split", "--p", "5", "--mode", "ordinary")
    assert code == 0 and json.loads(out)["result"] == "PASS"


def test_classify_symbolic_i4(capsys):
    code, out, _ = call(capsys, "classify", "--p", "0", "--symbolic", "--bundle", "E20")
    rep = json.loads(out)
    assert code == 0 and rep["has_fibration"] is False and rep["row"] == "i-4"
    assert rep["mode"] == "symbolic"


def test_ku_check(capsys):
    code, out, _ = call(capsys, "ku-check", "--type", "2|2,3|3,7|7")
    assert code == 0 and json.loads(out)["result"] is False
    code, out, _ = call(capsys, "ku-check", "--type", "2,2,2|2,2,2")
    assert code == 0 and json.loads(out)["result"] is True


def test_parse_types():
    assert parse_types("2|2,3|3") == [(2, 2), (3, 3)]
    assert parse_types("4,4|1,4") == [(4, 1), (4, 4)]
    assert parse_types("5|5") == [(5, 5)]


def test_classify_concrete(capsys, files):
    code, out, _ = call(capsys, "classify", "--curve", files["f5"], "--bundle", "O+L(P)", "--explain")
    rep = json.loads(out)
    assert code == 0 and rep["row"] == "i-2" and rep["agrees_with_table"]
    assert rep["lattice"]["K^2"] == 0 and rep["derivation"]
    code, out, _ = call(capsys, "classify", "--curve", files["f2"], "--bundle", "EQ(Q)")
    assert json.loads(out)["row"] == "ii-3"


def test_curve_info(capsys, files):
    code, out, _ = call(capsys, "curve", "info", "--curve", files["f5"])
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 4 and rep["trace"] == 2
    assert rep["supersingular"] is False and rep["group_structure"] == [4]


def test_enumerate(capsys):
    code, out, _ = call(capsys, "enumerate-fibers", "--d", "-1", "--p", "3", "--max-m", "27")
    fams = json.loads(out)["families"]
    assert sorted(fams) == ["IV", "V"] and len(fams["IV"]) == 3


def test_cover_check(capsys, files):
    code, out, _ = call(capsys, "cover-check", "--case", "ii-3", "--curve", files["f2"])
    rep = json.loads(out)
    assert code == 0 and rep["result"] == "PASS"
    assert all(v == "PASS" for v in rep["clauses"].values())
    code, out, _ = call(capsys, "cover-check", "--case", "ii-2", "--p", "2", "--supersingular")
    assert code == 0


def test_usage_errors(capsys, files):
    assert call(capsys, "classify", "--bundle", "E30", "--p", "0")[0] == 2
    assert call(capsys, "classify", "--p", "3", "--symbolic", "--bundle", "EQ")[0] == 2
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys, "classify", "--curve", files["f5"], "--bundle", "EQ(R)")[0] == 2
    assert call(capsys, "ku-check", "--type", "2|x")[0] == 2


def test_domain_errors_named(capsys):
    code, _, err = call(capsys, "sym-split", "--p", "4", "--mode", "ordinary")
    assert code == 1 and json.loads(err)["error"] == "NonPrime"


def test_unreachable_point(capsys, files):
    cfg = dict(F5, points={"T": {"order": 7}})
    path = files["dir"] / "f7.json"
    path.write_text(json.dumps(cfg))
    code, _, err = call(capsys, "classify", "--curve", str(path), "--bundle", "O+L(T)")
    assert code == 1 and "unreachable at this field size" in err


def test_determinism(capsys, files):
    a = call(capsys, "classify", "--curve", files["f5"], "--bundle", "O+L(P)", "--explain")[1]
    b = call(capsys, "classify", "--curve", files["f5"], "--bundle", "O+L(P)", "--explain")[1]
    assert a == b


def test_batch_order(capsys, files):
    batch = [
        {"curve": files["f5"], "bundle": "O+L(P)"},
        {"p": 0, "symbolic": True, "bundle": "EQ"},
        {"p": 2, "symbolic": True, "ordinary": False, "bundle": "EQ"},
        {"p": 3, "symbolic": True, "ordinary": True, "bundle": "O+L", "order": "inf"},
    ]
    path = files["dir"] / "batch.json"
    path.write_text(json.dumps(batch))
    code, out, _ = call(capsys, "classify", "--batch", str(path))
    res = json.loads(out)["results"]
    assert code == 0
    assert [r["row"] for r in res] == ["i-2", "ii-1", "ii-2", "i-3"]
    assert [r["index"] for r in res] == [0, 1, 2, 3]


def test_config_loading(files):
    assert load_config(files["f2"]) == load_config(files["f2"])
    E, pts = curve_from_config(load_config(files["f2"]))
    assert E.p == 2 and not pts["Q"].is_infinity
    with pytest.raises(InvalidInput):
        curve_from_config({"field": {"p": 5}, "b4": 1})
    with pytest.raises(NeedsFieldExtension):
        curve_from_config(dict(F5, points={"T": {"order": 3}}))


def test_max_field_flag(capsys, files):
    code, _, err = call(capsys, "--max-field", "4", "curve", "info", "--curve", files["f5"])
    assert code == 1 and json.loads(err)["error"] == "DegreeOutOfRange"
    assert call(capsys, "curve", "info", "--curve", files["f5"])[0] == 0
