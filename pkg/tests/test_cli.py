import io
import json
import shutil
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from maskdisk import catalog
from maskdisk.cli import main
from maskdisk.masking import MaskableSet
from maskdisk.serialize import dumps, encode_claimed

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def fx(name):
    return str(FIXTURES / name)


def schema(name):
    return json.loads(resources.files("maskdisk").joinpath(f"schemas/{name}.schema.json").read_text())


def test_verify_nd_passes():
    code, text = run("verify", fx("nd_n3_d4.json"), fx("nd_n3_d4.claimed.json"))
    doc = json.loads(text)
    assert code == 0 and doc["verdict"] == "pass" and doc["witnesses"] == []
    assert doc["diagnostics"]["max_marginal_deviation"] < 1e-9
    assert doc["diagnostics"]["disks_found"] == 3


@pytest.mark.parametrize("claim", ["nd_n3_d4.truncated.claimed.json", "nd_n3_d4.printed.claimed.json"])
def test_verify_partial_claims_fail_with_witnesses(claim):
    code, text = run("verify", fx("nd_n3_d4.json"), fx(claim))
    doc = json.loads(text)
    assert code == 2 and doc["verdict"] == "fail"
    assert doc["witnesses"] and all(w["space"] == "input" for w in doc["witnesses"])
    assert doc["diagnostics"]["condition1"] is True and doc["diagnostics"]["condition2"] is False


def test_verify_corrupt_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", str(bad), fx("nd_n3_d4.claimed.json"))[0] == 1
    assert run("verify", str(tmp_path / "missing.json"), fx("nd_n3_d4.claimed.json"))[0] == 1


def test_verify_rejects_non_isometry(tmp_path, capsys):
    doc = json.loads((FIXTURES / "nd_n3_d4.json").read_text())
    doc["matrix"][0][0] = [2.0, 0.0]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    assert run("verify", str(path), fx("nd_n3_d4.claimed.json"))[0] == 1
    assert "isometry" in capsys.readouterr().err


def test_verify_rejects_malformed_claim(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"disks": [{"coeffs": [1.0]}]}))
    assert run("verify", fx("nd_n3_d4.json"), str(path))[0] == 1
    path.write_text(json.dumps({"disks": [], "states": []}))
    assert run("verify", fx("nd_n3_d4.json"), str(path))[0] == 1


def test_usage_errors_exit_one():
    for argv in ([], ["nope"], ["verify"], ["classify", fx("type_ii.subspace.json"), fx("type_ii.spec.json")]):
        with pytest.raises(SystemExit) as info:
            run(*argv)
        assert info.value.code == 1
    assert run("verify", fx("nd_n3_d4.json"), fx("nd_n3_d4.claimed.json"), "--tol-alg", "1e-3")[0] == 1


@pytest.mark.parametrize(
    "example_id,mode,tag",
    [
        ("type_ii", "qutrit", "TypeII"),
        ("qubit_bell_pair", "qubit", "Disk(2)"),
        ("bell_triple", "qutrit", "FiniteOrthogonalSet(3)"),
    ],
)
def test_classify_fixtures(example_id, mode, tag):
    code, text = run("classify", fx(f"{example_id}.subspace.json"), fx(f"{example_id}.spec.json"), "--mode", mode)
    doc = json.loads(text)
    assert code == 0 and doc["verdict"] == tag and doc["mode"] == mode
    jsonschema.validate(doc, schema("report"))
    if tag == "TypeII":
        assert doc["diagnostics"]["obstruction_empty"] is True
        assert len(doc["witnesses"]) == 2 and all(w["kind"] == "disk" for w in doc["witnesses"])


def test_classify_mode_mismatch():
    assert run("classify", fx("nd_n3_d4.json"), fx("nd_n3_d4.spec.json"), "--mode", "qutrit")[0] == 1
    assert run("classify", fx("type_ii.subspace.json"), fx("type_ii.spec.json"), "--mode", "qubit")[0] == 1
    assert run("classify", fx("type_ii.subspace.json"), fx("nd_n3_d4.spec.json"), "--mode", "qutrit")[0] == 1


def test_list_examples():
    code, text = run("list-examples")
    lines = text.strip().splitlines()
    assert code == 0 and [ln.split("\t")[0] for ln in lines] == list(catalog.EXAMPLE_IDS)


def test_example_writes_fixtures(tmp_path):
    code, text = run("example", "type_ii", "--out", str(tmp_path))
    assert code == 0 and json.loads(text)["verdict"] == "TypeII"
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["type_ii.claimed.json", "type_ii.json", "type_ii.spec.json", "type_ii.subspace.json"]
    for name in names:
        assert (tmp_path / name).read_bytes() == (FIXTURES / name).read_bytes()


def test_example_params_and_errors():
    code, text = run("example", "appendix_b_family", "--params", "nu=0")
    assert code == 0 and json.loads(text)["verdict"] == "TypeII"
    assert run("example", "nope")[0] == 1
    assert run("example", "type_iii", "--params", "nu")[0] == 1
    assert run("example", "type_iii", "--params", "nu=x")[0] == 1
    assert run("example", "type_iii", "--params", "nu=0")[0] == 1
    assert run("example", "type_iii", "--params", "zeta=1")[0] == 1
    assert run("example", "bell_triple", "--params", "theta=1")[0] == 1


def test_cd_example_report():
    code, text = run("example", "cd_n3_d2")
    diag = json.loads(text)["diagnostics"]
    assert code == 0 and diag["obstruction_hits"] == 0 and diag["pairs"] == 50
    assert diag["max_marginal_deviation"] < 1e-9


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("MASKDISK_SEED", "7")
    _, text = run("classify", fx("qubit_bell_pair.subspace.json"), fx("qubit_bell_pair.spec.json"), "--mode", "qubit")
    assert json.loads(text)["diagnostics"]["seed"] == 7
    _, text = run("classify", fx("qubit_bell_pair.subspace.json"), fx("qubit_bell_pair.spec.json"), "--mode", "qubit", "--seed", "3")
    assert json.loads(text)["diagnostics"]["seed"] == 3
    monkeypatch.setenv("MASKDISK_SEED", "seven")
    assert run("list-examples")[0] == 0
    assert run("classify", fx("qubit_bell_pair.subspace.json"), fx("qubit_bell_pair.spec.json"), "--mode", "qubit")[0] == 1


def _perturbed_claim(tmp_path, scale):
    doc = json.loads((FIXTURES / "nd_n3_d4.claimed.json").read_text())
    amps = doc["disks"][0]["basis"][0]["amplitudes"]
    doc["disks"][0]["basis"][0]["amplitudes"] = [[re * scale, im * scale] for re, im in amps]
    path = tmp_path / f"claim_{scale}.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_loaded_states_are_renormalized(tmp_path):
    code, text = run("verify", fx("nd_n3_d4.json"), _perturbed_claim(tmp_path, 1 + 5e-7))
    doc = json.loads(text)
    assert code == 0 and 4e-7 < doc["diagnostics"]["input_norm_error"] < 6e-7


def test_loaded_states_off_norm_rejected(tmp_path):
    assert run("verify", fx("nd_n3_d4.json"), _perturbed_claim(tmp_path, 1 + 1e-5))[0] == 1


@pytest.mark.parametrize(
    "pattern,name",
    [
        ("*.spec.json", "spec"),
        ("*.claimed.json", "claimed"),
        ("*.subspace.json", "subspace"),
    ],
)
def test_fixtures_match_schemas(pattern, name):
    paths = sorted(FIXTURES.glob(pattern))
    assert paths
    for path in paths:
        jsonschema.validate(json.loads(path.read_text()), schema(name))


def test_machine_fixtures_match_schema():
    paths = [p for p in FIXTURES.glob("*.json") if p.name.count(".") == 1]
    assert len(paths) == len(catalog.EXAMPLE_IDS)
    for path in paths:
        jsonschema.validate(json.loads(path.read_text()), schema("machine"))


def test_state_schema_rejects_missing_amplitudes():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"dim": 2}, schema("state"))


@pytest.mark.parametrize("example_id", catalog.EXAMPLE_IDS)
def test_example_reports_are_schema_valid(example_id):
    code, text = run("example", example_id)
    doc = json.loads(text)
    jsonschema.validate(doc, schema("report"))
    assert code == 0 and doc["verdict"] == doc["expected"]


def test_repeated_runs_are_byte_identical(tmp_path):
    first = run("classify", fx("type_iii.subspace.json"), fx("type_iii.spec.json"), "--mode", "qutrit", "--seed", "4")
    second = run("classify", fx("type_iii.subspace.json"), fx("type_iii.spec.json"), "--mode", "qutrit", "--seed", "4")
    assert first == second
    copy = tmp_path / "copy"
    shutil.copytree(FIXTURES, copy)
    a = run("verify", str(copy / "nd_n3_d4.json"), str(copy / "nd_n3_d4.printed.claimed.json"))
    b = run("verify", fx("nd_n3_d4.json"), fx("nd_n3_d4.printed.claimed.json"))
    assert a == b


def test_partial_nd_claims_match_catalog():
    printed = catalog.nd_printed_claim()
    truncated = MaskableSet(printed.disks[:1])
    assert (FIXTURES / "nd_n3_d4.printed.claimed.json").read_text() == dumps(encode_claimed(printed))
    assert (FIXTURES / "nd_n3_d4.truncated.claimed.json").read_text() == dumps(encode_claimed(truncated))
