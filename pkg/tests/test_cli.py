import numpy as np
import pytest

from carbonlab.calibration import bundled_sample_path
from carbonlab.cli import run_cli


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version(capsys):
    code, out, _err = run(capsys, "--version")
    assert code == 0
    assert "carbonlab" in out


def test_unknown_subcommand(capsys):
    code, _out, err = run(capsys, "frobnicate")
    assert code == 1
    assert "usage" in err.lower()


def test_unknown_flag(capsys):
    code, _out, err = run(capsys, "simulate", "--frob", "1")
    assert code == 1
    assert "usage" in err.lower()


def test_simulate_two_rows(capsys, tmp_path):
    out = tmp_path / "traj.csv"
    code, _o, _e = run(
        capsys, "simulate", "--t-end", "0.05", "--dt", "0.05", "--out", str(out)
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,C,G,F,N"
    assert len(lines) == 3
    assert lines[1].startswith("0.0,130.0,")


def test_simulate_stdout_default(capsys):
    code, out, _err = run(capsys, "simulate", "--t-end", "0.05", "--dt", "0.05")
    assert code == 0
    assert out.startswith("t,C,G,F,N\n")


def test_simulate_numerical_failure_exit_code(capsys, tmp_path):
    code, _out, err = run(
        capsys,
        "simulate",
        "--t-end", "2000000", "--dt", "1000000",
        "--x0", "1e300,0,0,0",
        "--out", str(tmp_path / "x.csv"),
    )
    assert code == 2
    assert "numerical failure" in err


def test_equilibria_report_gdp_value(capsys):
    code, out, _err = run(capsys, "equilibria")
    assert code == 0
    assert out.count("G = 26.8125\n") == 4
    for kind in ("E1", "E2", "E3", "E4"):
        assert f"[{kind}] exists=True" in out


def test_stability_report(capsys):
    code, out, _err = run(capsys, "stability")
    assert code == 0
    assert "[E4] locally_stable=True" in out
    assert "[E1] locally_stable=False" in out
    assert "routh:" in out
    assert "[global]" in out and "certified=" in out


def _e1_c_from_report(out):
    block = out.split("[E2]")[0]
    for line in block.splitlines():
        if line.strip().startswith("C ="):
            return float(line.split("=")[1])
    raise AssertionError("no E1 C line found")


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "params.cfg"
    cfg.write_text("# test config\nalpha = 2.0\n")
    defaults_c = _e1_c_from_report(run(capsys, "equilibria")[1])
    file_c = _e1_c_from_report(run(capsys, "equilibria", "--config", str(cfg))[1])
    flag_c = _e1_c_from_report(
        run(capsys, "equilibria", "--config", str(cfg), "--set", "alpha=3.0")[1]
    )
    g_star = 26.8125
    assert defaults_c == pytest.approx((1.68 + (0.0003 - 0.0008) * g_star) / 0.016, rel=1e-12)
    assert file_c == pytest.approx((2.0 + (0.0003 - 0.0008) * g_star) / 0.016, rel=1e-12)
    assert flag_c == pytest.approx((3.0 + (0.0003 - 0.0008) * g_star) / 0.016, rel=1e-12)


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "params.cfg"
    cfg.write_text("gamma = 2.0\n")
    code, _out, err = run(capsys, "equilibria", "--config", str(cfg))
    assert code == 1
    assert "unknown key" in err


def test_set_pi_coeff_key(capsys):
    code, out, _err = run(capsys, "equilibria", "--set", "pi_coeff=0.001")
    assert code == 0
    assert "[E3] exists=False" in out  # large mortality removes the forest-free state


def test_gsa_requires_enough_samples(capsys):
    code, _out, err = run(capsys, "gsa", "--samples", "5")
    assert code == 1
    assert "more than 17" in err


def test_gsa_output_and_jobs_determinism(capsys, tmp_path):
    common = ["gsa", "--samples", "30", "--seed", "4", "--t-snap", "50", "--dt", "0.5"]
    a, b, c = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
    assert run(capsys, *common, "--jobs", "1", "--out", str(a))[0] == 0
    assert run(capsys, *common, "--jobs", "1", "--out", str(b))[0] == 0
    assert run(capsys, *common, "--jobs", "3", "--out", str(c))[0] == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "# samples=30"
    assert lines[4] == "parameter,C,G,F,N"
    assert len(lines) == 5 + 15


def test_sweep_outputs(capsys, tmp_path):
    code, out, _err = run(
        capsys,
        "sweep", "--param", "phi", "--values", "0.005,0.007",
        "--t-end", "5", "--dt", "0.1", "--out-dir", str(tmp_path),
    )
    assert code == 0
    assert (tmp_path / "sweep_phi_0.005.csv").exists()
    assert (tmp_path / "sweep_phi_0.007.csv").exists()
    summary = (tmp_path / "sweep_phi_summary.csv").read_text().splitlines()
    assert summary[0] == "phi,C,G,F,N"
    assert len(summary) == 3
    assert "0.005" in out


def test_sweep_rejects_unknown_parameter(capsys, tmp_path):
    code, _out, err = run(
        capsys, "sweep", "--param", "gamma", "--values", "1", "--out-dir", str(tmp_path)
    )
    assert code == 1
    assert "usage" in err.lower()


def test_control_outputs(capsys, tmp_path):
    code, out, _err = run(
        capsys,
        "control", "--tf", "5", "--dt", "0.1", "--out-dir", str(tmp_path),
    )
    assert code == 0
    solution = (tmp_path / "control_solution.csv").read_text().splitlines()
    assert solution[0] == "t,u,C,G,F,N,lam1,lam2,lam3,lam4"
    assert len(solution) == 52
    baseline_csv = (tmp_path / "control_baseline.csv").read_text().splitlines()
    assert baseline_csv[0] == "t,C,G,F,N"
    assert "J_optimal=" in out and "converged=True" in out


def test_control_nonconvergence_exit_code(capsys, tmp_path):
    code, _out, err = run(
        capsys,
        "control", "--tf", "5", "--dt", "0.1", "--max-iter", "1",
        "--out-dir", str(tmp_path),
    )
    assert code == 2
    assert "did not converge" in err


def test_estimate_bundled(capsys):
    code, out, _err = run(capsys, "estimate", "--data", bundled_sample_path())
    assert code == 0
    assert "gdp arithmetic_growth_rate_per_year=" in out
    code_g, out_g, _err = run(
        capsys, "estimate", "--data", bundled_sample_path(), "--geometric"
    )
    assert code_g == 0
    assert "geometric_growth_rate_per_year=" in out_g


def test_estimate_missing_file(capsys, tmp_path):
    code, _out, err = run(capsys, "estimate", "--data", str(tmp_path / "none.csv"))
    assert code == 1
    assert "error" in err.lower()


def test_simulate_byte_identical_reruns(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--t-end", "3", "--dt", "0.05"]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
