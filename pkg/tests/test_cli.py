import json

import pytest

from sheafforcing.catalog import CATALOG
from sheafforcing.cli import INVALID, MALFORMED, NOT_FORCED, OK, main
from sheafforcing.sitefile import site_to_doc


@pytest.fixture
def site_file(tmp_path):
    def write(key="2", mutate=None):
        doc = site_to_doc(CATALOG[key]())
        if mutate:
            mutate(doc)
        p = tmp_path / f"site{len(list(tmp_path.iterdir()))}.json"
        p.write_text(json.dumps(doc))
        return str(p)
    return write


def lines(capsys):
    return [json.loads(s) for s in capsys.readouterr().out.splitlines() if s.strip()]


def test_validate_ok(site_file, capsys):
    assert main(["validate", site_file()]) == OK
    assert lines(capsys) == [{"valid": True, "violations": []}]


def test_validate_missing_identity(site_file, capsys):
    def drop(doc):
        doc["arrows"] = [a for a in doc["arrows"] if a["name"] != "id_A"]
        doc["comp"] = [t for t in doc["comp"] if "id_A" not in t]
    assert main(["validate", site_file(mutate=drop)]) == INVALID
    out = lines(capsys)[0]
    assert not out["valid"] and out["violations"][0]["law"]


def test_validate_malformed(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text("[1, 2")
    assert main(["validate", str(p)]) == MALFORMED
    assert main(["validate", str(tmp_path / "absent.json")]) == MALFORMED


@pytest.mark.parametrize("key,obj,size", [("2", "B", 3), ("2'", "B", 2), ("1", "*", 2)])
def test_omega_sizes(key, obj, size, capsys):
    assert main(["omega", "@" + key, "--object", obj]) == OK
    out = lines(capsys)[0]
    assert len(out["elements"]) == size
    for op in ("meet", "join", "impl"):
        assert len(out[op]) == size and all(len(r) == size for r in out[op])


def test_omega_boolean_on_point(capsys):
    main(["omega", "@1"])
    out = lines(capsys)[0]
    bot, top = sorted(range(2), key=lambda i: len(out["elements"][i]))
    assert out["impl"][top][bot] == bot and out["impl"][bot][bot] == top


def test_omega_unknown_object():
    assert main(["omega", "@2", "--object", "Z"]) == INVALID


def test_force_reflexivity(tmp_path, capsys):
    p = tmp_path / "a.json"
    p.write_text(json.dumps({"set": [[{"atom": "u"}, "u"]]}))
    assert main(["force", "@2", "--object", "B", "--formula", "a = a", "--env", f"a={p}"]) == OK
    out = lines(capsys)[0]
    assert out["forced"] and out["top"] and out["truth"] == ["id_B", "u"]


def test_force_lem_instance(tmp_path, capsys):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"set": [[{"atom": "u"}, "u"]]}))
    code = main(["force", "@2", "--object", "B", "--env", f"b={p}",
                 "--formula", "(exists x . x in b) or not (exists x . x in b)"])
    assert code == NOT_FORCED
    out = lines(capsys)[0]
    assert out["truth"] == ["u"] and not out["top"]
    assert out["scope"] == "rank:1"


def test_force_atom_or_set(capsys):
    assert main(["force", "@2", "--formula", "forall x . (x : atom) or (x : set)"]) == OK


def test_force_hf_env(capsys):
    assert main(["force", "@2'", "--formula", "exists y in a . y = y", "--env", "a=hf:{{}}"]) == OK


@pytest.mark.parametrize("argv,code", [
    (["force", "@2", "--formula", "a = "], MALFORMED),
    (["force", "@2", "--formula", "a = a"], INVALID),
    (["force", "@2", "--formula", "a = a", "--env", "a"], MALFORMED),
    (["force", "@2", "--object", "B", "--formula", "a = a", "--env", "a=/nonexistent.json"], MALFORMED),
    (["force", "@nope", "--formula", "a = a"], MALFORMED),
    (["frobnicate", "@2"], MALFORMED),
])
def test_error_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_force_ill_typed_name(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"set": [[{"atom": "id_B"}, "u"]]}))
    assert main(["force", "@2", "--object", "B", "--formula", "a = a", "--env", f"a={p}"]) == INVALID


def test_axioms_point(capsys):
    assert main(["axioms", "@1"]) == OK
    recs = lines(capsys)
    assert {r["axiom"] for r in recs} >= {"Pairing", "Union", "Atom1", "PowerSet"}
    assert all(r["status"] in ("pass", "rank-relative pass") for r in recs)


def test_axioms_budget_row(capsys, monkeypatch):
    monkeypatch.setenv("SHEAF_FORCING_BUDGET", "50")
    assert main(["axioms", "@chain3", "--rank", "2"]) == NOT_FORCED
    assert any(r["status"] == "budget" for r in lines(capsys))


def test_equiv_covered_arrow(capsys):
    assert main(["equiv", "@2'", "--bound", "2"]) == OK
    summary = lines(capsys)[-1]
    assert summary["ok"] and summary["counts"] and set(summary["counts"]) == {"pass"}


def test_delta0_runs_clean(capsys):
    assert main(["delta0", "@chain3", "--count", "20", "--seed", "3"]) == OK
    assert lines(capsys)[-1]["agree"] == 20


def test_output_is_deterministic(capsys):
    main(["delta0", "@2", "--count", "15", "--seed", "9"])
    first = capsys.readouterr().out
    main(["delta0", "@2", "--count", "15", "--seed", "9"])
    assert capsys.readouterr().out == first


def test_human_mode(capsys):
    assert main(["omega", "@2", "--object", "B", "--human"]) == OK
    assert "has 3 elements" in capsys.readouterr().out
