"""CLI surface: run reports, determinism, error objects, exit codes."""

import io
import json
import subprocess
import sys

import pytest

from lorcut import SymMatrix, named_ratio, witness_pentagonal
from lorcut.cli import run
from lorcut.metrics import metric_to_json, tree_metric, random_tree
from lorcut.ratios import ratio_to_json


def invoke(argv):
    out = io.StringIO()
    code = run(argv, stream=out)
    return code, out.getvalue()


def invoke_json(argv):
    code, text = invoke(argv)
    return code, json.loads(text)


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def test_lorentzian_check_identity_false_exit_zero(tmp_path):
    matrix = write_json(tmp_path / "m.json",
                        SymMatrix.from_rows([[1, 0], [0, 1]]).to_json())
    code, report = invoke_json(["lorentzian", "check", "--matrix", matrix])
    assert code == 0
    assert report["results"]["lorentzian"] is False
    assert report["results"]["signature"] == {"n_pos": 2, "n_neg": 0, "n_zero": 0, "rank": 2}
    assert report["version"] and "wall_time_ms" in report


def test_cutcone_facets_n5_orbits(tmp_path):
    out_file = tmp_path / "facets.json"
    code, report = invoke_json(["cutcone", "facets", "--n", "5", "--orbits",
                                "--out", str(out_file)])
    assert code == 0
    results = report["results"]
    assert results["total"] == 40
    assert sorted(o["size"] for o in results["orbits"]["orbits"]) == [10, 30]
    assert json.loads(out_file.read_text())["total"] == 40


def test_results_byte_identical_across_runs():
    _, first = invoke(["cutcone", "facets", "--n", "4", "--orbits"])
    _, second = invoke(["cutcone", "facets", "--n", "4", "--orbits"])
    a = json.dumps(json.loads(first)["results"], sort_keys=True)
    b = json.dumps(json.loads(second)["results"], sort_keys=True)
    assert a == b


def test_ratio_eval_witness(tmp_path):
    ratio = write_json(tmp_path / "r.json",
                       ratio_to_json(named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)))
    matrix = write_json(tmp_path / "m.json", witness_pentagonal(1).to_json())
    code, report = invoke_json(["ratio", "eval", "--ratio", ratio, "--matrix", matrix])
    assert code == 0
    assert report["results"]["value"] == "32/9"
    assert report["inputs"]["files"]["matrix"].startswith("sha256:")


def test_ratio_check_unbounded_certificate(tmp_path):
    ratio = write_json(tmp_path / "r.json",
                       {"n": 3, "offdiag": {"1,2": "1/1"}})
    code, report = invoke_json(["ratio", "check", "--ratio", ratio])
    assert code == 0
    assert report["results"]["bounded"] is False
    assert report["results"]["violating_subset"] == [2]


def test_ratio_decompose_af(tmp_path):
    ratio = write_json(tmp_path / "r.json",
                       ratio_to_json(named_ratio("alexandrov_fenchel", (1, 2), 3)))
    code, report = invoke_json(["ratio", "decompose", "--ratio", ratio])
    assert code == 0
    assert report["results"]["found"] is True
    assert sum(t["coefficient"] for t in report["results"]["terms"]) == 2


def test_metric_commands(tmp_path):
    import random

    tree = random_tree(5, random.Random(1))
    metric = write_json(tmp_path / "d.json", metric_to_json(tree_metric(tree)))
    code, report = invoke_json(["metric", "delta", "--metric", metric])
    assert code == 0 and report["results"]["delta"] == "0/1"

    code, report = invoke_json(["metric", "treeapprox", "--metric", metric])
    assert code == 0
    assert report["results"]["four_point"] is True
    assert report["results"]["max_gap"] == "0/1"

    code, report = invoke_json(["metric", "decompose", "--metric", metric])
    assert code == 0
    assert report["results"]["terms"]

    matrix = write_json(tmp_path / "m.json", witness_pentagonal(1).to_json())
    code, report = invoke_json(["metric", "check", "--matrix", matrix, "--p", "2"])
    assert code == 0 and report["results"]["member"] is True


def test_constant_commands(tmp_path):
    code, report = invoke_json(["constant", "n3", "--a", "1", "--b", "0", "--c", "0",
                                "--verify"])
    assert code == 0
    assert report["results"]["constant"] == 2.0
    assert report["results"]["agreement"] is True

    code, report = invoke_json(["constant", "tp", "--p", "2", "--a", "1", "--b", "0",
                                "--c", "0"])
    assert code == 0 and report["results"]["constant"] == 4.0

    ratio = write_json(tmp_path / "r.json",
                       ratio_to_json(named_ratio("triangular", (1, 2, 3), 3)))
    code, report = invoke_json(["constant", "estimate", "--ratio", ratio,
                                "--iters", "200", "--seed", "5"])
    assert code == 0
    assert report["results"]["evaluations"] >= 200
    code2, report2 = invoke_json(["constant", "estimate", "--ratio", ratio,
                                  "--iters", "200", "--seed", "5"])
    assert report2["results"] == report["results"]


def test_conjecture_subfree_n3():
    code, report = invoke_json(["conjecture", "subfree", "--n", "3", "--all"])
    assert code == 0
    assert report["results"]["all_hold"] is True
    assert len(report["results"]["reports"]) == 3

    code, report = invoke_json(["conjecture", "subfree", "--n", "3", "--facet-index", "0"])
    assert code == 0 and len(report["results"]["reports"]) == 1


def test_reproduce_single_criterion(tmp_path):
    report_dir = tmp_path / "report"
    code, report = invoke_json(["reproduce", "--criterion", "9",
                                "--report-dir", str(report_dir)])
    assert code == 0
    assert report["results"]["all_passed"] is True
    assert (report_dir / "report.json").exists()
    assert (report_dir / "criteria.csv").exists()
    assert (report_dir / "constant_triangle.png").exists()
    assert (report_dir / "pentagonal_sweep.png").exists()


def test_missing_file_yields_error_object():
    code, payload = invoke_json(["lorentzian", "check", "--matrix", "/nonexistent.json"])
    assert code == 2
    assert payload["error"]["code"] == "domain"


def test_usage_error_yields_error_object(capsys):
    code, payload = invoke_json(["no-such-command"])
    assert code == 2
    assert payload["error"]["code"] == "usage"


def test_resource_limit_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("LR_RESOURCE_LIMIT_MB", "0")
    code, payload = invoke_json(["cutcone", "facets", "--n", "5"])
    assert code == 3
    assert payload["error"]["code"] == "resource_limit"
    assert "current_rays" in payload["error"]["context"]


def test_table_format():
    code, text = invoke(["--format", "table", "constant", "tp", "--p", "2",
                         "--a", "1", "--b", "0", "--c", "0"])
    assert code == 0
    assert "constant = 4.0" in text


def test_module_invocation_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "lorcut", "cutcone", "facets", "--n", "3"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["total"] == 3
