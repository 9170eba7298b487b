import json
import subprocess
import sys

import pytest

from metacyc.cli import main
from metacyc.lattices import GammaParams, make_L1
from metacyc.modules import fp_twist, group_ring
from metacyc.groups import make_g, make_gamma, pair_for


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.mark.parametrize("p,r,count", [(3, 2, 6), (5, 1, 3), (7, 6, 18)])
def test_classify(capsys, p, r, count):
    code, out, _ = run(capsys, "classify", "--p", str(p), "--r", str(r))
    assert code == 0
    assert out["count"] == count and out["distinct"]
    assert out["params"]["s"] is not None


def test_classify_bad_params(capsys):
    code, _, err = run(capsys, "classify", "--p", "5", "--r", "3")
    assert code == 2 and "3" in err


def test_phi_on_fp(tmp_path, capsys):
    path = write(tmp_path, "fp.json", fp_twist(3, 2, 0).to_json())
    code, out, _ = run(capsys, "phi", path)
    assert code == 0
    assert (out["a"], out["b"]) == ([1, 0], [0, 1])


def test_fingerprint_on_group_ring(tmp_path, capsys):
    gp = GammaParams(5, 4)
    path = write(tmp_path, "zg.json", group_ring(make_gamma(5, 4), gp.ctx).to_json())
    code, out, _ = run(capsys, "fingerprint", path)
    assert code == 0 and out["c"] == [1, 1, 1, 1]


def test_omega_twice_on_l1(tmp_path, capsys):
    gp = GammaParams(5, 4)
    path = write(tmp_path, "l1.json", make_L1(gp, 0).to_module().to_json())
    code, out, _ = run(capsys, "omega", path, "--times", "2")
    assert code == 0
    assert (out["a"], out["b"]) == ([0, 1, 0, 0], [0, 0, 0, 0])


def test_omega_on_vector(tmp_path, capsys):
    path = write(tmp_path, "v.json", {"r": 2, "a": [1, 0], "b": [0, 0]})
    code, out, _ = run(capsys, "omega", path)
    assert (code, out["a"], out["b"]) == (0, [0, 0], [0, 1])


def test_schema_error_names_field(tmp_path, capsys):
    obj = fp_twist(3, 2, 0).to_json()
    del obj["rank"]
    code, _, err = run(capsys, "phi", write(tmp_path, "bad.json", obj))
    assert code == 2 and "$.rank" in err
    obj = fp_twist(3, 2, 0).to_json()
    obj["action"]["tau"] = [[1, 2]]
    code, _, err = run(capsys, "phi", write(tmp_path, "bad2.json", obj))
    assert code == 2 and "$.action.tau" in err


def test_precision_exhausted_exit_code(tmp_path, capsys):
    obj = fp_twist(3, 2, 0).to_json()
    obj["k"] = 3
    obj["relations"] = [[27]]  # 3^3 is zero at k = 3: not finite at this precision
    path = write(tmp_path, "x.json", obj)
    code, _, err = run(capsys, "phi", path)
    assert code == 3 and "--k" in err
    code, out, _ = run(capsys, "phi", path, "--k", "6")
    assert code == 0 and sum(out["a"]) == sum(out["b"])


@pytest.mark.parametrize("p,r,size", [(3, 2, 2), (7, 6, 4)])
def test_adm(capsys, p, r, size):
    code, out, _ = run(capsys, "adm", "--p", str(p), "--r", str(r))
    assert code == 0 and out["rank"] == size == len(out["basis"])


def test_realize_then_predict(tmp_path, capsys):
    v = {"r": 4, "p": 5, "a": [1, 0, 1, 0], "b": [0, 1, 0, 1]}
    code, plan, _ = run(capsys, "realize", write(tmp_path, "v.json", v))
    assert code == 0 and plan["admissible"]
    assert all("condition_b" in w for w in plan["decomposition"]["witnesses"])
    pairs = [{"D": st["D"], "I": st["I"]} for st in plan["pairs"]]
    code, pred, _ = run(capsys, "predict", write(tmp_path, "pairs.json", pairs))
    assert code == 0
    assert (pred["preshift"]["a"], pred["preshift"]["b"]) == (v["a"], v["b"])


def test_realize_not_admissible(tmp_path, capsys):
    code, out, _ = run(capsys, "realize", write(tmp_path, "v.json", {"r": 2, "a": [1, 0], "b": [1, 0]}), "--p", "3")
    assert code == 4 and not out["admissible"] and out["certificate"]


def test_predict_from_pair_objects(tmp_path, capsys):
    G = make_g(3, 2)
    pr = pair_for(G, "II", 1, 2)
    path = write(tmp_path, "pairs.json", {"pairs": [{"D": pr.D.to_json(), "I": pr.I.to_json()}]})
    code, out, _ = run(capsys, "predict", path)
    assert code == 0 and out["preshift"]["a"] == [0, 1]


def test_verify_small(capsys):
    code, out, err = run(capsys, "verify", "--p", "3", "--r", "2")
    assert code == 0 and out["passed"]
    assert sorted({c["criterion"] for c in out["checks"]}) == list(range(1, 14))


def test_verify_suite_subset(capsys):
    code, out, _ = run(capsys, "verify", "--p", "5", "--r", "2", "--suite", "monoid")
    assert code == 0 and out["checks"]


def test_verify_usage_error(capsys):
    code, _, err = run(capsys, "verify", "--p", "5", "--r", "3")
    assert code == 2


def test_output_is_byte_stable():
    cmd = [sys.executable, "-m", "metacyc", "adm", "--p", "13", "--r", "12"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
