import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from qconv.cli import main
from qconv.serialize import array_from_json, array_to_json, load_schema, schema_names


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), (json.loads(err) if err.strip() else None)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_schemas_are_valid():
    names = schema_names()
    for want in ("state_input", "run_config", "test_report", "magic_report", "convolve", "clt", "enumerate", "verify"):
        assert want in names
    for name in names:
        jsonschema.Draft202012Validator.check_schema(load_schema(name))


def test_complex_json_round_trip():
    a = np.array([[1 + 2j, 0.5], [-1j, 3]])
    enc = array_to_json(a)
    assert enc[0][0] == [1.0, 2.0]
    assert np.array_equal(array_from_json(enc), a)


def test_test_state_t(capsys):
    code, doc, _ = run(capsys, "test-state", "--named", "T")
    assert code == 0
    assert abs(doc["report"]["p_accept"] - 13 / 16) < 1e-12
    assert doc["schema_version"] == "1.0" and doc["command"] == "test-state"


def test_test_gate(capsys):
    code, doc, _ = run(capsys, "test-gate", "--gate", "F", "--d", "3")
    assert code == 0 and abs(doc["report"]["p_accept"] - 1) < 1e-9
    code, doc, _ = run(capsys, "test-gate", "--gate", "T", "--shots", "1000", "--seed", "3")
    assert code == 0 and doc["report"]["shots"]["count"] == 1000


def test_magic_entropy_and_mrm(capsys):
    code, doc, _ = run(capsys, "magic-entropy", "--named", "T", "--N", "2", "--alpha", "2")
    assert code == 0
    p = 3 / 8
    assert abs(doc["report"]["value"] + np.log2(p**2 + (1 - p) ** 2)) < 1e-12
    code, doc, _ = run(capsys, "mrm", "--named", "T", "--method", "oracle")
    assert code == 0 and abs(doc["report"]["value"] - 1) < 1e-9


def test_deterministic_per_seed(capsys):
    a = run(capsys, "test-state", "--named", "haar", "--n", "2", "--seed", "11", "--shots", "500")[1]
    b = run(capsys, "test-state", "--named", "haar", "--n", "2", "--seed", "11", "--shots", "500")[1]
    c = run(capsys, "test-state", "--named", "haar", "--n", "2", "--seed", "12", "--shots", "500")[1]
    assert a == b and a != c


def test_convolve_output_reimports(capsys, tmp_path):
    code, doc, _ = run(capsys, "convolve", "--named", "T", "--K", "3")
    assert code == 0
    assert np.abs(np.array(doc["spectrum"]) - [0.75, 0.25]).max() < 1e-12
    path = write(tmp_path, "conv.json", doc)
    code, doc2, _ = run(capsys, "convolve", "--matrix", path, "--K", "3")
    assert code == 0
    # X and Y components of the T state go 2^-1/2 -> 2^-3/2 -> 2^-9/2
    rho = array_from_json(doc2["state"]["matrix"])
    assert abs(np.trace(rho @ rho).real - 0.5 * (1 + 2.0**-8)) < 1e-12


def test_vector_and_matrix_inputs(capsys, tmp_path):
    v = write(tmp_path, "v.json", {"d": 2, "vector": [[2**-0.5, 0], [0.5, 0.5]]})
    code, doc, _ = run(capsys, "test-state", "--vector", v)
    assert code == 0 and abs(doc["report"]["p_accept"] - 13 / 16) < 1e-12
    m = write(tmp_path, "m.json", [[[1, 0], [0, 0]], [[0, 0], [0, 0]]])
    code, doc, _ = run(capsys, "mrm", "--matrix", m)
    assert code == 0 and abs(doc["report"]["value"]) < 1e-12


def test_validation_exit_codes(capsys, tmp_path):
    half_trace = write(tmp_path, "a.json", [[[0.5, 0], [0, 0]], [[0, 0], [0, 0]]])
    code, _, err = run(capsys, "mrm", "--matrix", half_trace)
    assert code == 2 and "trace" in err["message"]
    not_psd = write(tmp_path, "b.json", [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]])
    code, _, err = run(capsys, "mrm", "--matrix", not_psd)
    assert code == 2 and "positive semidefinite" in err["message"]
    bad_shape = write(tmp_path, "c.json", [[[1, 0], [0]], [[0, 0], [0, 0]]])
    code, _, err = run(capsys, "mrm", "--matrix", bad_shape)
    assert code == 2 and "$.matrix[0][1]" in err["message"]
    code, _, _ = run(capsys, "convolve", "--named", "T", "--K", "4")
    assert code == 2
    code, _, _ = run(capsys, "test-state", "--d", "4")
    assert code == 2
    code, _, err = run(capsys, "magic-entropy", "--matrix", write(tmp_path, "d.json", [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]))
    assert code == 2 and "mixed" in err["message"]


def test_capability_exit_codes(capsys):
    code, _, err = run(capsys, "enumerate", "--what", "cliffords", "--n", "3")
    assert code == 3 and err["error"] == "UnsupportedError"
    code, _, err = run(capsys, "convolve", "--named", "zero", "--n", "5", "--K", "9", "--method", "dense_key_unitary")
    assert code == 3 and err["error"] == "DimensionCapError"


def test_clt_command(capsys):
    code, doc, _ = run(capsys, "clt", "--named", "T", "--K", "3", "5", "7", "9")
    assert code == 0 and doc["all_hold"] and len(doc["records"]) == 4
    code, doc, _ = run(capsys, "clt", "--gate", "T", "--K", "3", "5")
    assert code == 0 and doc["subject"] == "channel"


def test_enumerate_counts(capsys):
    for what, d, n, count in [("cliffords", 2, 1, 24), ("stabilizers", 3, 1, 12), ("msps", 2, 1, 7)]:
        code, doc, _ = run(capsys, "enumerate", "--what", what, "--d", str(d), "--n", str(n))
        assert code == 0 and doc["count"] == count == len(doc["items"])


def test_verify_subset_and_out(capsys, tmp_path):
    out = tmp_path / "v.json"
    code = main(["verify", "--only", "pauli,states", "--trials", "3", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["failed"] == 0 and {r["suite"] for r in doc["results"]} == {"pauli", "states"}


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "qconv.cli", "test-state", "--named", "zero"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["report"]["p_accept"] == pytest.approx(1)
