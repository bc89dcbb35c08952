"""End-to-end command-line interface checks (driven through main())."""

import json
import math

import pytest

from lindosc.cli import main, parse_sweep_axis

MODEL = ["--lambda", "0.2", "--mu", "0.1", "--coth", "3"]
SQUEEZED = MODEL + ["--delta-sq", "4"]


# ---------------------------------------------------------------------------
# coeffs / validate
# ---------------------------------------------------------------------------


def test_coeffs_text(capsys):
    assert main(["coeffs", *MODEL]) == 0
    out = capsys.readouterr().out
    assert "d_pp = 0.45" in out
    assert "d_qq = 0.15" in out
    assert "d_pq = 0" in out


def test_coeffs_json(capsys):
    assert main(["coeffs", "--json", *MODEL]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["d_pp"] == pytest.approx(0.45)
    assert payload["d_qq"] == pytest.approx(0.15)


def test_coeffs_closed_system(capsys):
    assert main(["coeffs", "--closed"]) == 0
    assert "d_pp = 0" in capsys.readouterr().out


def test_validate_passes(capsys):
    assert main(["validate", *MODEL]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith("pass") for line in lines)
    # only the weak-coupling advisory may flag at lam = 0.2
    for line in lines:
        if line.startswith("FAIL"):
            assert "(advisory)" in line


def test_validate_cold_bath_fails(capsys):
    assert main(["validate", "--lambda", "0.2", "--mu", "0.1", "--coth", "1.1"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_validate_inverted_coupling_fails():
    assert main(["validate", "--lambda", "0.05", "--mu", "0.1", "--coth", "3"]) == 1


# ---------------------------------------------------------------------------
# trajectory
# ---------------------------------------------------------------------------


def test_trajectory_lyapunov(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(
        ["trajectory", *SQUEEZED, "--t-end", "1", "--dt", "0.1", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,mean_q,mean_p,s_qq,s_pp,s_pq,sigma_det"
    assert len(lines) == 12  # header + 11 samples
    first = lines[1].split(",")
    assert float(first[3]) == pytest.approx(2.0)


def test_trajectory_closed_route_blanks_variances(tmp_path):
    out = tmp_path / "closed.csv"
    code = main(
        [
            "trajectory",
            *SQUEEZED,
            "--route",
            "closed",
            "--t-end",
            "0.5",
            "--dt",
            "0.1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    row = out.read_text().splitlines()[1].split(",")
    assert row[3] == "nan" and row[4] == "nan"
    assert row[6] == "0.25"  # sigma_det is known in closed form


def test_trajectory_all_routes_agree(tmp_path):
    out = tmp_path / "all.csv"
    code = main(
        [
            "trajectory",
            *SQUEEZED,
            "--route",
            "all",
            "--t-end",
            "2",
            "--dt",
            "0.1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].endswith(",max_route_dev")
    deviations = [float(line.split(",")[-1]) for line in lines[1:]]
    assert max(deviations) < 1e-6


def test_trajectory_zero_time(tmp_path):
    out = tmp_path / "zero.csv"
    assert main(["trajectory", *SQUEEZED, "--t-end", "0", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2


def test_trajectory_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["trajectory", *SQUEEZED, "--t-end", "3", "--dt", "0.05"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------------------
# metrics / window
# ---------------------------------------------------------------------------


def test_metrics_csv(tmp_path):
    out = tmp_path / "metrics.csv"
    code = main(
        ["metrics", *SQUEEZED, "--t-end", "1", "--dt", "0.5", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,delta_qd,delta_cc,gamma,sigma_det,sigma_pq"
    # r = 0 start: no correlations yet, so delta_cc is infinite at t = 0
    assert lines[1].split(",")[2] == "inf"
    assert float(lines[1].split(",")[1]) == pytest.approx(1.0)


def test_window_empty_for_closed_symmetric_state(capsys):
    assert main(["window", "--closed", "--t-end", "20", "--dt", "0.01"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["empty"] is True
    assert payload["count"] == 0
    assert payload["windows"] == []


def test_window_reports_intervals(capsys):
    code = main(["window", *SQUEEZED, "--t-end", "5", "--dt", "0.01"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["qd_threshold"] == 0.99
    assert payload["cc_threshold"] == 10.0
    assert payload["count"] == 3
    assert payload["empty"] is False
    for a, b in payload["windows"]:
        assert 0.0 <= a < b <= 5.0


# ---------------------------------------------------------------------------
# deco
# ---------------------------------------------------------------------------


def test_deco_text_output(capsys):
    assert main(["deco", *SQUEEZED]) == 0
    lines = capsys.readouterr().out.splitlines()
    keys = [line.split(" = ")[0] for line in lines]
    assert keys == [
        "m",
        "omega",
        "lambda",
        "mu",
        "hbar",
        "coth_C",
        "delta",
        "r",
        "rate",
        "t_deco",
        "t_d",
        "t_rel",
        "variant",
        "sigma_be",
        "sigma_heisenberg",
        "sigma_mb",
        "regime",
    ]
    values = dict(line.split(" = ") for line in lines)
    assert float(values["t_deco"]) == pytest.approx(0.15151515151515149)
    assert float(values["t_rel"]) == pytest.approx(5.0)
    assert values["variant"] == "r0"
    assert values["regime"] == "quantum-statistical"


def test_deco_json_with_separation(capsys):
    code = main(
        ["deco", "--lambda", "0.2", "--coth", "3", "--separation", "1", "--json"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rate_ratio"] == pytest.approx(1.5)
    assert payload["separation"] == 1.0


def test_deco_high_temperature_variant(capsys):
    assert main(["deco", *SQUEEZED, "--high-T"]) == 0
    assert "variant = high_T_r0" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# figdata
# ---------------------------------------------------------------------------


def test_figdata_contours_and_trajectory(tmp_path, capsys):
    code = main(["figdata", "1", "--out-dir", str(tmp_path), "--t-samples", "15"])
    assert code == 0
    for name in (
        "fig1_trajectory.csv",
        "fig1_contour_delta1.csv",
        "fig1_contour_delta4.csv",
    ):
        assert (tmp_path / name).exists()
    lines = (tmp_path / "fig1_trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,mean_q,mean_p"
    assert len(lines) == 16


def test_figdata_metric_surface(tmp_path):
    assert main(["figdata", "2a", "--out-dir", str(tmp_path), "--t-samples", "3"]) == 0
    lines = (tmp_path / "fig2a.csv").read_text().splitlines()
    assert lines[0] == "C,t,delta_qd"
    assert len(lines) == 1 + 51 * 3


def test_figdata_stationary_wigner_peak(tmp_path):
    assert main(["figdata", "4b", "--out-dir", str(tmp_path), "--n", "41"]) == 0
    lines = (tmp_path / "fig4b.csv").read_text().splitlines()
    values = [float(x) for line in lines[1:] for x in line.split(",")]
    # odd grid size puts a cell center exactly at the origin
    assert max(values) == pytest.approx(1.0 / (3.0 * math.pi), rel=1e-12)


def test_figdata_rejects_tiny_grid(tmp_path):
    assert main(["figdata", "3a", "--out-dir", str(tmp_path), "--n", "2"]) == 1


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def test_parse_sweep_axis():
    axis = parse_sweep_axis("delta:1:8:4")
    assert axis.name == "delta" and axis.count == 4 and not axis.log
    axis = parse_sweep_axis("C:1.5:100:7:log")
    assert axis.log
    with pytest.raises(ValueError):
        parse_sweep_axis("delta:1:8")
    with pytest.raises(ValueError):
        parse_sweep_axis("speed:1:8:4")
    with pytest.raises(ValueError):
        parse_sweep_axis("delta:1:8:0")
    # a single-point axis is legal: it pins one parameter
    assert parse_sweep_axis("delta:2:2:1").values() == [2.0]


def test_sweep_single_axis(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(
        [
            "sweep",
            *MODEL,
            "--axis",
            "delta:1:8:4",
            "--record",
            "delta_qd,t_deco",
            "--t",
            "0.5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "delta,delta_qd,t_deco"
    assert len(lines) == 5
    qd = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(b < a for a, b in zip(qd, qd[1:]))  # more squeezing, more classical


def test_sweep_two_axes_row_major(tmp_path):
    out = tmp_path / "sweep2.csv"
    code = main(
        [
            "sweep",
            *MODEL,
            "--axis",
            "delta:1:4:3",
            "--axis",
            "C:1.5:6:2",
            "--record",
            "sigma_det",
            "--t",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "delta,C,sigma_det"
    assert len(lines) == 1 + 3 * 2
    # first axis varies slowest
    first_col = [float(line.split(",")[0]) for line in lines[1:]]
    assert first_col == sorted(first_col)


def test_sweep_invalid_points_become_nan(tmp_path):
    out = tmp_path / "nan.csv"
    code = main(
        [
            "sweep",
            "--lambda",
            "0.3",
            "--coth",
            "3",
            "--axis",
            "mu:0.25:1.25:2",
            "--record",
            "sigma_det",
            "--t",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert rows[0][1] != "nan"
    assert rows[1][1] == "nan"  # mu = 1.25 >= omega: not underdamped


def test_sweep_rejects_three_axes():
    code = main(
        [
            "sweep",
            *MODEL,
            "--axis",
            "delta:1:2:2",
            "--axis",
            "C:2:3:2",
            "--axis",
            "r:0:0.5:2",
            "--record",
            "delta_qd",
        ]
    )
    assert code == 1


def test_sweep_rejects_unknown_record():
    assert main(["sweep", *MODEL, "--axis", "delta:1:2:2", "--record", "bogus"]) == 1


# ---------------------------------------------------------------------------
# fpe
# ---------------------------------------------------------------------------


def test_fpe_stationary_run(tmp_path, capsys):
    code = main(
        [
            "fpe",
            *MODEL,
            "--stationary",
            "--grid-n",
            "64",
            "--t-end",
            "0.1",
            "--snapshots",
            "0.05",
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "linf_drift_vs_initial = " in out
    # file names carry the full-precision time stamp
    snap_name = f"snapshot_{format(0.05, '.17g')}.csv"
    for name in ("initial.csv", "final.csv", snap_name, "manifest.json"):
        assert (tmp_path / name).exists()
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["lambda"] == 0.2
    assert manifest["coefficients"]["d_pp"] == pytest.approx(0.45)
    assert manifest["initial"]["stationary"] is True
    assert manifest["run"]["steps"] > 0
    assert manifest["files"]["snapshots"] == {format(0.05, ".17g"): snap_name}
    assert manifest["linf_drift_vs_initial"] < 1e-3


def test_fpe_determinism(tmp_path):
    argv = ["fpe", *SQUEEZED, "--grid-n", "48", "--t-end", "0.1"]
    assert main(argv + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out-dir", str(tmp_path / "b")]) == 0
    for name in ("final.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()


# ---------------------------------------------------------------------------
# exit codes and flag conflicts
# ---------------------------------------------------------------------------


def test_missing_config_file_is_io_failure(capsys):
    assert main(["coeffs", "--config", "/nonexistent/osc.cfg"]) == 3
    assert "i/o failure" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(capsys):
    assert main(["coeffs", "--warp", "9"]) == 1
    assert capsys.readouterr().err != ""


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == 1


def test_closed_conflicts_with_damping(capsys):
    assert main(["coeffs", "--closed", "--lambda", "0.2"]) == 1
    assert "closed" in capsys.readouterr().err


def test_coth_conflicts_with_temp():
    assert main(["coeffs", *MODEL, "--temp", "2"]) == 1


def test_numeric_failure_exit_code(tmp_path, capsys):
    code = main(
        [
            "trajectory",
            *MODEL,
            "--route",
            "rk4",
            "--dt",
            "50",
            "--t-end",
            "5000",
            "--out",
            str(tmp_path / "x.csv"),
        ]
    )
    assert code == 2
    assert "numeric failure" in capsys.readouterr().err


def test_config_file_drives_model(tmp_path, capsys):
    cfg = tmp_path / "osc.cfg"
    cfg.write_text("lambda = 0.2\nmu = 0.1\ntemp.C = 3\n")
    assert main(["coeffs", "--config", str(cfg)]) == 0
    assert "d_pp = 0.45" in capsys.readouterr().out


def test_flag_overrides_config_file(tmp_path, capsys):
    cfg = tmp_path / "osc.cfg"
    cfg.write_text("lambda = 0.2\nmu = 0.1\ntemp.C = 3\n")
    assert main(["coeffs", "--config", str(cfg), "--mu", "0"]) == 0
    out = capsys.readouterr().out
    assert "d_pp = 0.3" in out
    assert "d_qq = 0.3" in out
