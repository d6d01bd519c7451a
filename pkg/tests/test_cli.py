import json

import numpy as np
import pytest

from smoothwalk.cli import canonical_json, run


def _json_report(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return json.loads(out)


def test_analyze_triangle_stationary():
    report = _json_report(["analyze", "--gen", "complete:3"])
    np.testing.assert_allclose(report["pi"], [1 / 3] * 3, atol=1e-12)
    assert report["t_mix"] is not None
    assert report["rate_alpha"] == pytest.approx(0.5)
    assert report["lazy_comparison"]["same_stationary"]


def test_analyze_d_curve_is_monotone():
    report = _json_report(["analyze", "--gen", "cycle:5", "--tmax", "40"])
    curve = np.array(report["d_curve"])
    assert np.all(np.diff(curve) <= 1e-12)


def test_analyze_attention_reports_power_stationary():
    report = _json_report(["analyze", "--gen", "complete:4", "--op", "att", "--seed", "2"])
    pi = np.array(report["pi"])
    assert pi.shape == (4,)
    assert pi.sum() == pytest.approx(1.0)
    assert report["lazy_comparison"] is None


def test_analyze_exit_two_on_bipartite_walk():
    code, out, err = run(["analyze", "--gen", "path:3"])
    assert code == 2
    assert "bipartite" in err


def test_exit_one_on_missing_edge_file(tmp_path):
    code, out, err = run(["analyze", "--edges", str(tmp_path / "missing.txt")])
    assert code == 1
    assert out == ""


def test_exit_one_on_bad_edge_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 x\n")
    code, out, err = run(["analyze", "--edges", str(bad)])
    assert code == 1


def test_exit_three_on_power_iteration_budget():
    # An attention walk on a long odd cycle mixes too slowly for the
    # fixed-point iteration budget.
    code, out, err = run(["analyze", "--gen", "cycle:101", "--op", "att"])
    assert code == 3
    assert "converge" in err


def test_edges_file_round_trip(tmp_path):
    path = tmp_path / "triangle.txt"
    path.write_text("0 1\n1 2\n0 2\n")
    report = _json_report(["analyze", "--edges", str(path)])
    np.testing.assert_allclose(report["pi"], [1 / 3] * 3, atol=1e-12)


def test_out_flag_writes_file(tmp_path):
    target = tmp_path / "report.json"
    code, out, err = run(["analyze", "--gen", "complete:3", "--out", str(target)])
    assert code == 0 and out == ""
    on_disk = target.read_text()
    direct = run(["analyze", "--gen", "complete:3"])[1]
    assert on_disk == direct


def test_csv_format_has_header_and_rows():
    code, out, err = run(["analyze", "--gen", "complete:3", "--tmax", "10", "--format", "csv"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "t,d"
    assert len(lines) == 11


def test_dropedge_report_fields():
    report = _json_report(["dropedge", "--gen", "complete:3", "--samples", "500"])
    assert report["max_abs_error"] < 0.2
    analytic = np.array(report["analytic"])
    np.testing.assert_allclose(analytic.sum(axis=1), 1.0, atol=1e-12)
    assert "exhaustive_max_error" in report
    assert report["exhaustive_max_error"] < 1e-12


def test_dropedge_chi_square_present_with_enough_samples():
    report = _json_report(["dropedge", "--gen", "complete:3", "--samples", "2000"])
    assert len(report["chi_square"]) == 3
    assert all(entry["passed"] for entry in report["chi_square"])


def test_inhomo_const_converges():
    report = _json_report(["inhomo", "--schedule", "const", "--layers", "30"])
    assert report["classification"] == "converged"
    assert report["necessary_condition"]["consistent"]


def test_inhomo_oscillate_does_not_converge():
    report = _json_report(["inhomo", "--schedule", "oscillate", "--layers", "50"])
    assert report["classification"] == "non_converged"
    assert report["necessary_condition"]["contrapositive_triggered"]


def test_inhomo_decay_converges():
    report = _json_report(["inhomo", "--schedule", "decay", "--layers", "40"])
    assert report["classification"] == "converged"


def test_inhomo_schedule_file(tmp_path):
    layers = [{"0,1": 0.5, "1,0": 0.5, "0,2": 0.0, "2,0": 0.0, "1,2": 0.0, "2,1": 0.0}] * 5
    path = tmp_path / "schedule.json"
    path.write_text(json.dumps(layers))
    report = _json_report(
        ["inhomo", "--gen", "complete:3", "--schedule", f"file:{path}", "--layers", "5"]
    )
    assert report["layers"] == 5
    assert report["classification"] == "converged"


def test_oversmooth_node_std_decays():
    report = _json_report(["oversmooth", "--gen", "complete:4", "--layers", "60"])
    stds = report["node_std"]
    assert stds[-1] < 1e-6
    assert all(b <= a + 1e-12 for a, b in zip(stds, stds[1:]))


def test_train_demo_small_run():
    report = _json_report(
        ["train-demo", "--epochs", "2", "--lr", "0.5"]
    )
    assert len(report["loss_curve"]) == 3
    assert report["min_layer_gap"] >= 0.0
    assert len(report["pi_drift"]) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--gen", "complete:3"],
        ["analyze", "--gen", "cycle:5", "--op", "lazy:0.3"],
        ["dropedge", "--gen", "complete:3", "--samples", "200"],
        ["inhomo", "--schedule", "const", "--layers", "20"],
        ["oversmooth", "--gen", "complete:4", "--layers", "30"],
        ["train-demo", "--epochs", "2", "--lr", "0.5"],
    ],
)
def test_repeated_runs_are_byte_identical(argv):
    first = run(argv)
    second = run(argv)
    assert first[0] == second[0] == 0
    assert first[1] == second[1]


def test_canonical_json_formats_floats_and_sorts_keys():
    payload = canonical_json({"b": 0.1, "a": True, "c": [1, None]})
    assert payload == '{"a":true,"b":0.10000000000000001,"c":[1,null]}\n'
