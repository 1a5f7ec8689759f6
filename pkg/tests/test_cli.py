import json
import subprocess
import sys

import numpy as np
import pytest

from thinspec.cli import main
from thinspec.scenario import ConfigError, Scenario, SweepSpec, run_scenario, run_sweep
from thinspec.series import read_csv


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_kz_run_and_rerun_identical(tmp_path):
    args = ["kz", "--t0-over-that", "1e-3", "--out"]
    assert main(args + [str(tmp_path / "a")]) == 0
    assert main(args + [str(tmp_path / "b")]) == 0
    for name in ("kz.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    s = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert s["scenario"]["kind"] == "kz"
    assert s["scenario"]["params"]["H0"] == pytest.approx(1e-3)


def test_exact_csv_header_and_units(tmp_path):
    assert main(["exact", "--t0-over-that", "1e-2", "--out", str(tmp_path)]) == 0
    header = (tmp_path / "exact.csv").read_text().splitlines()[0]
    assert all("[" in col and col.endswith("]") for col in header.split(","))
    data = read_csv(tmp_path / "exact.csv")
    assert np.all(data["re_omega"] > 0)


def test_config_file_and_override(tmp_path):
    cfg = _write(tmp_path / "c.json", {"kind": "ed", "params": {"N": 60, "delta": 0.01, "t0_over_that": 0.01},
                                       "grid": {"t_end_over_that": 2.0, "n_samples": 101}})
    assert main(["ed", "--config", cfg, "--N", "80", "--out", str(tmp_path / "o")]) == 0
    s = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert s["scenario"]["params"]["N"] == 80
    assert s["summary"]["max_norm_drift"] < 1e-10


@pytest.mark.parametrize("argv", [
    ["check", "nonexistent"],
    ["exact", "--H0", "0"],
    ["kz", "--N", "7"],
    ["figure", "9"],
    ["sweep"],
])
def test_config_errors_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)] if argv[0] != "figure" else argv) == 2


def test_bad_config_contents(tmp_path):
    bad = _write(tmp_path / "bad.json", {"kind": "exact", "params": {"bogus": 1}})
    assert main(["exact", "--config", bad]) == 2
    with pytest.raises(ConfigError):
        Scenario.from_dict({"kind": "kz", "tolerances": {"nope": 1}})
    with pytest.raises(ConfigError):
        SweepSpec.from_dict({"axes": {"J": [1, 2]}})


def test_numerical_failure_exit_3(tmp_path):
    # the expansion cannot hold a frozen state this narrow
    cfg = _write(tmp_path / "c.json", {"kind": "kz", "params": {"t0_over_that": 1e-7}})
    out = tmp_path / "o"
    assert main(["kz", "--config", cfg, "--out", str(out)]) == 3
    diag = json.loads((out / "diagnostics.json").read_text())
    assert "diagnostics" in diag


def test_check_pass(tmp_path):
    assert main(["check", "wigner-eckart-vs-clebsch-gordan", "--out", str(tmp_path)]) == 0
    s = json.loads((tmp_path / "summary.json").read_text())["summary"]
    assert s["status"] == "PASS" and s["metric"] < 1e-12


def test_check_fail_exit_1(tmp_path):
    assert main(["check", "wigner-eckart-vs-clebsch-gordan", "--tol", "1e-30", "--out", str(tmp_path)]) == 1


def test_empty_sweep(tmp_path):
    rec = run_sweep(SweepSpec.from_dict({"axes": {}, "template": {"kind": "kz"}}), tmp_path)
    assert rec["n_points"] == 0 and rec["failed"] == []
    assert (tmp_path / "sweep.csv").read_text().count("\n") == 1


def test_sweep_worker_invariance_and_failure_isolation(tmp_path):
    spec = {"axes": {"t0_over_that": [1e-7, 1e-3, 1e-2], "N": [100, 1000]},
            "template": {"kind": "kz", "grid": {"n_samples": 51}}}
    cfg = _write(tmp_path / "s.json", spec)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "w1"), "--workers", "1"]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "w3"), "--workers", "3"]) == 0
    for name in ("sweep.csv", "summary.json"):
        assert (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w3" / name).read_bytes()
    rec = json.loads((tmp_path / "w1" / "summary.json").read_text())
    assert rec["failed"] == ["p00000", "p00001"]
    assert all(p["status"] == "ok" for p in rec["points"][2:])


def test_sweep_defect_law(tmp_path):
    spec = SweepSpec.from_dict({"axes": {"t0_over_that": {"geom": [1e-1, 1e-4, 4]}},
                                "template": {"kind": "kz", "grid": {"n_samples": 11}}})
    rec = run_sweep(spec, tmp_path)
    small = rec["points"][-1]["scalars"]
    assert small["relative_law_deviation"] < 0.05


def test_sweep_N_collapse(tmp_path):
    spec = SweepSpec.from_dict({"axes": {"N": [100, 1000, 10000]},
                                "template": {"kind": "exact", "params": {"t0_over_that": 0.01},
                                             "grid": {"n_samples": 201, "t_end_over_that": 5.0}}})
    run_sweep(spec, tmp_path)
    traces = [read_csv(tmp_path / "points" / f"p{i:05d}" / "exact.csv") for i in range(3)]
    for tr in traces[1:]:
        assert np.allclose(tr["N_re_omega"], traces[0]["N_re_omega"], rtol=1e-9, atol=0)


def test_budget_enforced():
    with pytest.raises(ConfigError):
        SweepSpec.from_dict({"axes": {"N": list(range(4, 400, 2))}, "budget": 10})


def test_static_scenario_writes_ed_column(tmp_path):
    rec = run_scenario(Scenario.from_dict({"kind": "static", "params": {"N": 100}, "grid": {"n_H": 5}}), tmp_path)
    data = read_csv(tmp_path / "static.csv")
    assert len(data["H"]) == 5
    assert np.all(data["order_parameter_ed"] > 0)
    assert rec["scalars"]["ed_over_continuum_min"] > 1


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "thinspec", "figure", "1", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "figure1.csv").exists()
