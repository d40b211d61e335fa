import io
import json
import math

import numpy as np
import pytest

from finsler.cli import main

EUCLID = '{"dim": 2, "family": "riemannian", "a": {"1,1": "1", "2,2": "1"}}'
MINKOWSKI = ('{"dim": 2, "family": "randers", '
             '"a": {"1,1": "1", "2,2": "1"}, "b": ["0.5", "0"]}')
WAVE = ('{"dim": 2, "family": "randers", '
        '"a": {"1,1": "1", "2,2": "1"}, "b": ["0.3*sin(x1)", "0"]}')
SPHERE = ('{"dim": 2, "family": "riemannian", '
          '"a": {"1,1": "1", "2,2": "sin(x1)^2"}, '
          '"x_box": [[0.3, 2.8], [-1, 1]]}')
QUADRATIC = '{"dim": 2, "family": "expression", "expression": "y1^2+y2^2"}'


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_compute_g_euclidean_json():
    code, text = run([
        "compute", "--metric", EUCLID, "--point", "0,0;1,0",
        "--object", "g", "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)
    assert doc["object"] == "g"
    assert doc["signature"] == ["d", "d"]
    assert doc["components"] == [[1.0, 0.0], [0.0, 1.0]]
    assert doc["point"] == {"x": [0.0, 0.0], "y": [1.0, 0.0]}


def test_json_output_round_trips_bytewise():
    for argv in (
        ["compute", "--metric", WAVE, "--point", "0.4,-0.2;1.1,0.6",
         "--object", "curvature_h", "--connection", "cartan",
         "--format", "json"],
        ["verify", "--metric", EUCLID, "--samples", "5", "--seed", "1",
         "--format", "json"],
        ["table", "--metric", WAVE, "--point", "0.4,-0.2;1.1,0.6",
         "--format", "json"],
    ):
        code, text = run(argv)
        assert code == 0
        rebuilt = json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n"
        assert rebuilt == text


def test_compute_hashiguchi_f_minkowski_is_zero():
    code, text = run([
        "compute", "--metric", MINKOWSKI, "--point", "0.3,0.1;1.0,0.4",
        "--object", "F", "--connection", "hashiguchi", "--format", "json",
    ])
    assert code == 0
    components = np.array(json.loads(text)["components"])
    assert components.shape == (2, 2, 2)
    assert np.abs(components).max() < 1e-12


def test_compute_chern_v_curvature_is_zero():
    code, text = run([
        "compute", "--metric", WAVE, "--point", "0.4,-0.2;1.1,0.6",
        "--object", "curvature_v", "--connection", "chern", "--format", "json",
    ])
    assert code == 0
    assert np.abs(np.array(json.loads(text)["components"])).max() == 0.0


def test_compute_table_format_uses_one_based_labels():
    code, text = run([
        "compute", "--metric", EUCLID, "--point", "0,0;1,0", "--object", "g",
    ])
    assert code == 0
    assert "g[1,1] = 1.0" in text
    assert "g[2,2] = 1.0" in text
    assert "g[0,0]" not in text


def test_compute_scalar_objects():
    code, text = run([
        "compute", "--metric", EUCLID, "--point", "0,0;3,4", "--object", "L",
        "--format", "json",
    ])
    assert code == 0 and json.loads(text)["components"] == 5.0
    code, text = run([
        "compute", "--metric", EUCLID, "--point", "0,0;3,4", "--object", "E",
        "--format", "json",
    ])
    assert code == 0 and json.loads(text)["components"] == 12.5


def test_verify_pass_and_exit_zero():
    code, text = run([
        "verify", "--metric", EUCLID, "--samples", "20", "--seed", "7",
    ])
    assert code == 0
    assert text.endswith("checks)\n")
    assert "overall: PASS" in text


def test_verify_nonhomogeneous_exits_one():
    code, text = run([
        "verify", "--metric", QUADRATIC, "--samples", "10", "--seed", "1",
    ])
    assert code == 1
    assert "[FAIL] homogeneity" in text
    assert "overall: FAIL" in text


def test_verify_randers_flat_passes():
    code, text = run([
        "verify", "--metric", MINKOWSKI, "--samples", "20", "--seed", "3",
    ])
    assert code == 0


def test_verify_sphere_with_spec_box():
    code, text = run([
        "verify", "--metric", SPHERE, "--samples", "20", "--seed", "5",
    ])
    assert code == 0


def test_verify_determinism_bytewise():
    argv = ["verify", "--metric", WAVE, "--samples", "15", "--seed", "9"]
    assert run(argv) == run(argv)
    argv_json = argv + ["--format", "json"]
    assert run(argv_json) == run(argv_json)


def test_exit_code_two_on_spec_errors(tmp_path, capsys):
    for argv in (
        ["compute", "--metric", '{"dim": 2, "family": "nope"}',
         "--point", "0,0;1,0", "--object", "g"],
        ["compute", "--metric", "{not json", "--point", "0,0;1,0",
         "--object", "g"],
        ["compute", "--metric", str(tmp_path / "missing.json"),
         "--point", "0,0;1,0", "--object", "g"],
        ["compute", "--metric", EUCLID, "--point", "0,0;1", "--object", "g"],
        ["compute", "--metric", EUCLID, "--point", "0,0,1,0", "--object", "g"],
    ):
        code, _ = run(argv)
        assert code == 2, argv


def test_exit_code_three_on_domain_errors():
    # slit-bundle violation
    code, _ = run([
        "compute", "--metric", EUCLID, "--point", "0,0;0.000000001,0",
        "--object", "g",
    ])
    assert code == 3
    # outside the admissible base region (sqrt of a negative form)
    conformal = ('{"dim": 2, "family": "riemannian", '
                 '"a": {"1,1": "x1+1.5", "2,2": "x1+1.5"}}')
    code, _ = run([
        "compute", "--metric", conformal, "--point=-2,0;1,0", "--object", "g",
    ])
    assert code == 3
    # homogeneity refusal on compute
    code, _ = run([
        "compute", "--metric", QUADRATIC, "--point", "0,0;1,0", "--object", "g",
    ])
    assert code == 3


def test_table_euclidean_all_zero_columns():
    code, text = run([
        "table", "--metric", EUCLID, "--point", "0,0;1,2", "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)
    for column in doc["columns"].values():
        for value in column.values():
            assert abs(value) < 1e-12


def test_table_sphere_columns_coincide():
    code, text = run([
        "table", "--metric", SPHERE, "--point", "0.8,0.1;0.5,1.0",
        "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)
    names = list(doc["columns"])
    for row in doc["rows"]:
        if "torsion" in row or "C" in row:
            continue  # torsion rows are zero anyway on Riemannian data
        values = [doc["columns"][n][row] for n in names]
        assert max(values) - min(values) < 1e-9


def test_table_randers_structure():
    code, text = run([
        "table", "--metric", WAVE, "--point", "0.4,-0.2;1.1,0.6",
        "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)
    cols = doc["columns"]
    assert cols["cartan"]["|F|"] == pytest.approx(cols["chern"]["|F|"])
    assert cols["hashiguchi"]["|F|"] == pytest.approx(cols["berwald"]["|F|"])
    assert cols["cartan"]["|C| ((h)hv-torsion)"] > 1e-3
    assert cols["chern"]["|C| ((h)hv-torsion)"] == 0.0
    assert cols["hashiguchi"]["|P| ((v)hv-torsion)"] == 0.0
    assert cols["berwald"]["|P| ((v)hv-torsion)"] == 0.0


def test_compare_euclidean():
    code, text = run([
        "compare", "--metric", EUCLID, "--point", "0,0;1,0", "--object", "g",
        "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)
    assert doc["objects"]["g"]["max_relative_error"] < 1e-6


def test_compare_sphere_gamma():
    code, text = run([
        "compare", "--metric", SPHERE, "--point",
        f"{math.pi / 4},0.0;0.5,1.0", "--object", "gamma", "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)
    engine = np.array(doc["objects"]["gamma"]["engine"])
    assert engine[0, 1, 1] == pytest.approx(-0.5, abs=1e-9)
    assert doc["objects"]["gamma"]["max_relative_error"] < 1e-6


def test_compare_minkowski_barthel_both_zero():
    code, text = run([
        "compare", "--metric", MINKOWSKI, "--point", "0.2,0.5;1.0,0.3",
        "--object", "barthel", "--format", "json",
    ])
    assert code == 0
    doc = json.loads(text)["objects"]["barthel"]
    assert np.abs(np.array(doc["engine"])).max() < 1e-12
    assert np.abs(np.array(doc["oracle"])).max() < 1e-9


def test_compare_all_objects_table_format():
    code, text = run([
        "compare", "--metric", WAVE, "--point", "0.4,-0.2;1.1,0.6",
    ])
    assert code == 0
    for obj in ("g", "gamma", "spray", "barthel", "cartan_F", "berwald_F"):
        assert f"{obj}: max relative error" in text
