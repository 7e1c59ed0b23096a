"""End-to-end command-line runs: exit codes, diagnostics, determinism."""

import json

import pytest

from ergosym import cli
from ergosym.divergence import VerificationResult


def write_cfg(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj, indent=1))
    return str(p)


def base_avg_cfg():
    return {
        "schema": 1,
        "seed": 11,
        "space": {"atoms": 4},
        "operator": {
            "kind": "composition",
            "map": [1, 2, 3, 0],
            "measure_preserving": True,
        },
        "function": {"re": [1, 0, 0, 0]},
        "checkpoints": [1, 4, 8],
        "probes": [0],
    }


# ------------------------------------------------------------------ success


def test_rearrange_roundtrip(tmp_path):
    cfg = write_cfg(tmp_path, "r.json", {
        "schema": 1, "seed": 3,
        "space": {"weights": [1.0, 1.0, 1.0]},
        "function": {"re": [3.0, 1.0, 2.0]},
    })
    assert cli.main(["rearrange", cfg, "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "rearrangement.csv").read_text().splitlines()
    assert lines[0] == "# schema=1 seed=3"
    assert lines[2].split(",") == ["0.0", "1.0", "3.0"]
    assert lines[4].split(",") == ["2.0", "3.0", "1.0"]


def test_output_name_override(tmp_path):
    cfg = write_cfg(tmp_path, "r.json", {
        "schema": 1, "seed": 0,
        "space": {"atoms": 2},
        "function": {"ones": True},
        "outputs": {"rearrangement": "mu.csv"},
    })
    assert cli.main(["rearrange", cfg, "--output-dir", str(tmp_path)]) == 0
    assert (tmp_path / "mu.csv").exists()
    assert not (tmp_path / "rearrangement.csv").exists()


def test_norms_with_orlicz_and_lorentz(tmp_path):
    cfg = write_cfg(tmp_path, "n.json", {
        "schema": 1, "seed": 7,
        "space": {"atoms": 3},
        "function": {"re": [3.0, 1.0, 2.0]},
        "orlicz": {"power": 1.0},
        "lorentz": {"capped": 2.0},
    })
    assert cli.main(["norms", cfg, "--output-dir", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "norms.json").read_text())
    assert obj["schema"] == 1 and obj["seed"] == 7
    assert obj["L1"] == pytest.approx(6.0)
    assert obj["Linf"] == pytest.approx(3.0)
    assert obj["L1capLinf"] == pytest.approx(6.0)
    assert obj["L1plusLinf"] == pytest.approx(3.0)
    assert obj["luxemburg"] == pytest.approx(6.0, abs=1e-8)
    assert obj["lorentz"] == pytest.approx(5.0)  # 3 + 2 over the first 2 units


def test_ds_check_permutation(tmp_path):
    cfg = write_cfg(tmp_path, "d.json", {
        "schema": 1, "seed": 1,
        "space": {"atoms": 3},
        "operator": {"kind": "composition", "map": [1, 2, 0],
                     "measure_preserving": True},
    })
    assert cli.main(["ds-check", cfg, "--output-dir", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "ds_report.json").read_text())
    assert obj["ds_ok"] and obj["l1_ok"] and obj["linf_ok"]
    assert obj["worst_column_sum"] == pytest.approx(1.0)


def test_average_counterexample_operator_needs_no_space(tmp_path):
    cfg = write_cfg(tmp_path, "a.json", {
        "schema": 1, "seed": 5,
        "operator": {"kind": "counterexample", "breakpoints": [1, 5],
                     "grid": 2, "window": 5},
        "function": {"ones": True},
        "checkpoints": [1, 5],
        "probes": [1],
    })
    assert cli.main(["average", cfg, "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "averages.csv").read_text().splitlines()
    assert lines[2].startswith("1,1,1.0,")
    n5 = lines[3].split(",")
    assert float(n5[2]) == pytest.approx(-0.6, abs=1e-12)
    assert n5[6] == "true"  # full mode: trace recorded


def test_weighted_average_cyclic_closed_form(tmp_path):
    cfg = dict(base_avg_cfg())
    cfg["weight"] = {"kind": "lambda_power", "lambda_re": 0.0, "lambda_im": 1.0}
    cfg["checkpoints"] = {"geometric": 4}
    path = write_cfg(tmp_path, "w.json", cfg)
    assert cli.main(["weighted-average", path, "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "averages.csv").read_text().splitlines()
    # checkpoints 1,2,4: at n=4 the lambda=i average of the delta at 0 is 1/4
    last = lines[-1].split(",")
    assert last[0] == "4"
    assert float(last[2]) == pytest.approx(0.25, abs=1e-12)
    assert float(last[3]) == pytest.approx(0.0, abs=1e-12)


def test_wiener_wintner_emits_oracle_and_resonance(tmp_path):
    cfg = write_cfg(tmp_path, "ww.json", {
        "schema": 1, "seed": 2,
        "system": {"order": 8, "step": 1},
        "function": {"character": 2},
        "probes": [0],
        "lambda_grid": 8,
        "checkpoints": [1, 8, 64],
    })
    assert cli.main(["wiener-wintner", cfg, "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "# schema=1 seed=2 resonant_lambdas=6"
    assert lines[1].endswith(",oracle_re,oracle_im,abs_err")
    for ln in lines[2:]:
        assert float(ln.split(",")[-1]) <= 1e-9


def test_return_times_product(tmp_path):
    cfg = write_cfg(tmp_path, "rt.json", {
        "schema": 1, "seed": 4,
        "system": {"order": 4},
        "function": {"re": [1, 0, 0, 0]},
        "second_system": {"order": 7},
        "second_function": {"re": [1, 0, 0, 0, 0, 0, 0]},
        "probes": [[0, 0]],
        "checkpoints": [28],
    })
    assert cli.main(["return-times", cfg, "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "product.csv").read_text().splitlines()
    assert lines[1] == "n,omega,y,re,im"
    row = lines[2].split(",")
    assert row[:3] == ["28", "0", "0"]
    assert float(row[3]) == pytest.approx(1.0 / 28.0, abs=1e-12)


def test_counterexample_default_run(tmp_path):
    assert cli.main(["counterexample", "--output-dir", str(tmp_path)]) == 0
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["breakpoints"] == [1, 5, 17]
    assert cert["verified"] is True
    assert cert["max_pipeline_deviation"] <= 1e-9
    traces = (tmp_path / "traces.csv").read_text().splitlines()
    assert traces[1] == "n,t,value"
    # 3 checkpoints x 9 probe points
    assert len(traces) == 2 + 3 * 9


def test_counterexample_profile_config(tmp_path):
    cfg = write_cfg(tmp_path, "p.json", {
        "schema": 1, "seed": 9,
        "space": {"atoms": 32},
        "function": {"ones": True},
    })
    assert cli.main([
        "counterexample", cfg, "--stages", "3", "--output-dir", str(tmp_path)
    ]) == 0
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["breakpoints"] == [1, 5, 17]
    assert cert["seed"] == 9


# ---------------------------------------------------------------- determinism


def test_identical_config_identical_bytes(tmp_path):
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    cfg = dict(base_avg_cfg())
    cfg["function"] = {"random": {"kind": "complex"}}
    path = write_cfg(tmp_path, "det.json", cfg)
    assert cli.main(["average", path, "--output-dir", str(out1)]) == 0
    assert cli.main(["average", path, "--output-dir", str(out2)]) == 0
    a = (out1 / "averages.csv").read_bytes()
    assert a == (out2 / "averages.csv").read_bytes()
    assert len(a) > 0


def test_seed_changes_random_function_output(tmp_path):
    cfg = dict(base_avg_cfg())
    cfg["function"] = {"random": {"kind": "complex"}}
    p1 = write_cfg(tmp_path, "s1.json", cfg)
    cfg2 = dict(cfg)
    cfg2["seed"] = 12
    p2 = write_cfg(tmp_path, "s2.json", cfg2)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert cli.main(["average", p1, "--output-dir", str(out1)]) == 0
    assert cli.main(["average", p2, "--output-dir", str(out2)]) == 0
    assert (out1 / "averages.csv").read_text() != (out2 / "averages.csv").read_text()


# ------------------------------------------------------------- diagnostics


def test_malformed_json_reports_line_and_column(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "schema": 1,,\n}\n')
    assert cli.main(["rearrange", str(p), "--output-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "config parse error at line 2, column 15" in err


def test_missing_config_file(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert cli.main(["rearrange", missing, "--output-dir", str(tmp_path)]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_validation_collects_all_diagnostics(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad.json", {
        "schema": 2,
        "seed": "abc",
        "space": {"atoms": 4},
        "operator": {"kind": "kernel",
                     "matrix_re": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]},
        "function": {"re": [1, 0, 0, 0]},
        "checkpoints": [5, 5],
        "probes": [9],
    })
    assert cli.main(["average", cfg, "--output-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "schema must be 1" in err
    assert "seed must be a 64-bit integer" in err
    assert "operator:" in err  # 3x3 kernel on a 4-atom space
    assert "checkpoints:" in err  # not strictly increasing
    assert "probe atom out of range" in err
    assert not list(tmp_path.glob("averages.csv"))


def test_weight_bound_violation_rejected(tmp_path, capsys):
    cfg = dict(base_avg_cfg())
    cfg["weight"] = {"kind": "explicit", "re": [0.5, 2.0], "bound": 1.0}
    path = write_cfg(tmp_path, "wb.json", cfg)
    assert cli.main(["weighted-average", path, "--output-dir", str(tmp_path)]) == 2
    assert "exceed the declared bound" in capsys.readouterr().err


def test_wiener_wintner_requires_grid_and_probes(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "ww.json", {
        "schema": 1, "seed": 0,
        "system": {"order": 8},
        "function": {"ones": True},
        "checkpoints": [1, 8],
    })
    assert cli.main(["wiener-wintner", cfg, "--output-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "lambda_grid" in err and "probes" in err


# ----------------------------------------------------------------- failures


def test_budget_exhaustion_exits_3(tmp_path, capsys):
    cfg = dict(base_avg_cfg())
    cfg["max_iterations"] = 4
    path = write_cfg(tmp_path, "b.json", cfg)
    assert cli.main(["average", path, "--output-dir", str(tmp_path)]) == 3
    assert "error:" in capsys.readouterr().err


def test_counterexample_window_too_small_exits_2(tmp_path, capsys):
    rc = cli.main([
        "counterexample", "--stages", "3", "--window", "8",
        "--output-dir", str(tmp_path),
    ])
    assert rc == 2
    assert "too short" in capsys.readouterr().err


def test_consistency_failure_exits_4(tmp_path, monkeypatch, capsys):
    def reject(cert, rearr, tol=1e-9):
        return VerificationResult(False, (0.0,), 0.0, 1)

    monkeypatch.setattr(cli.divergence, "verify_certificate", reject)
    rc = cli.main(["counterexample", "--output-dir", str(tmp_path)])
    assert rc == 4
    assert "failed verification at stage 1" in capsys.readouterr().err
    assert not (tmp_path / "certificate.json").exists()
