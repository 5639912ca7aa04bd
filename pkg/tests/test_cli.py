"""Command-line interface: exit codes, artifacts, config plumbing."""

import json
import math

import numpy as np
import pytest

from morphring import (
    ConfigError,
    IntegratorConfig,
    OutputConfig,
    RadiusPolicy,
    RingParams,
    ScenarioConfig,
    SlopeModel,
    TumbleState,
    config_to_toml,
)
from morphring.cli import main, steer_problem_from_toml


def _short_config_toml(write_plots=False) -> str:
    ring = RingParams(
        mass=1.0, perimeter=2.0, radius_policy=RadiusPolicy.MEAN_RADIUS
    )
    cfg = ScenarioConfig(
        ring=ring,
        initial=TumbleState(0, 0, 2 * math.pi, 0, math.pi / 2, 0, 0, 0),
        impulse=None,
        duration=0.5,
        integrator=IntegratorConfig(),
        slope_model=SlopeModel.EXTENDED,
        outputs=OutputConfig(write_plots=write_plots),
        output_hz=25.0,
    )
    return config_to_toml(cfg)


STEER_TABLE = """
[steer]
n = 4
theta_d = 0.0
y_bounds = [[0.025, 0.082], [0.05, 0.163], [0.025, 0.082]]
t_f_init = 1.0
t_f_bounds = [0.5, 2.0]
max_iter = 40
"""


def test_version_exits_zero(capsys):
    assert main(["--version"]) == 0
    assert "morphring" in capsys.readouterr().out


def test_no_command_prints_help_and_fails(capsys):
    assert main([]) == 2
    assert "simulate" in capsys.readouterr().out


def test_unknown_arguments_exit_two():
    assert main(["simulate", "--frobnicate"]) == 2
    assert main(["no-such-command"]) == 2


def test_missing_config_file_exits_two(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "nope.toml")]) == 2
    assert "config error" in capsys.readouterr().err


def test_malformed_config_exits_two(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text("duration = [unclosed\n")
    assert main(["simulate", "--config", str(p)]) == 2


def test_unknown_config_key_exits_two(tmp_path):
    p = tmp_path / "extra.toml"
    p.write_text(_short_config_toml() + "\nmystery = true\n")
    assert main(["simulate", "--config", str(p)]) == 2


def test_simulate_writes_artifacts(tmp_path, capsys):
    p = tmp_path / "run.toml"
    p.write_text(_short_config_toml())
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(p), "--out-dir", str(out)]) == 0
    assert (out / "trajectory.csv").exists()
    assert (out / "manifest.json").exists()
    stdout = capsys.readouterr().out
    assert "simulated 0.5 s" in stdout
    assert "wrote" in stdout
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["samples"] == 13  # round-half-even(0.5 * 25) + 1
    assert manifest["config"]["duration"] == 0.5


def test_simulate_failure_exits_one(tmp_path, capsys):
    text = _short_config_toml().replace("lean = 1.5707963267948966", "lean = 0.0005")
    assert "lean = 0.0005" in text
    p = tmp_path / "flat.toml"
    p.write_text(text)
    assert main(["simulate", "--config", str(p), "--out-dir", str(tmp_path / "o")]) == 1
    assert "run failed" in capsys.readouterr().err


def test_seed_check_reports_and_runs(tmp_path, capsys):
    p = tmp_path / "run.toml"
    p.write_text(_short_config_toml())
    out = tmp_path / "out"
    code = main(
        ["simulate", "--seed-check", "--config", str(p), "--out-dir", str(out)]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    checks = [line for line in stdout.split("\n") if line.startswith("[ok  ]")]
    assert len(checks) == 7


def test_sweep_writes_summary_and_run_dirs(tmp_path):
    base = _short_config_toml()
    p = tmp_path / "sweep.toml"
    p.write_text(
        base
        + "\n[impulse]\namplitude = 0.2\ncenter_time = 0.25\nsharpness = 8.0\n"
        + "baseline = 0.3183098861837907\n"
        + "\n[sweep]\namplitudes = [0.1]\nsharpnesses = [6.0]\n"
    )
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(p), "--out-dir", str(out)]) == 0
    assert (out / "sweep_summary.csv").exists()
    assert (out / "run_b0.1_g6" / "trajectory.csv").exists()
    lines = (out / "sweep_summary.csv").read_text().strip().split("\n")
    assert len(lines) == 2
    assert lines[1].startswith("0.1,6.0,completed,")


def test_inertia_table_outputs(tmp_path):
    p = tmp_path / "table.toml"
    p.write_text("[inertia_table]\nb_min = 0.1\nb_max = 0.3\ncount = 8\n")
    out = tmp_path / "out"
    assert main(["inertia-table", "--config", str(p), "--out-dir", str(out)]) == 0
    csv = (out / "inertia_table.csv").read_text().strip().split("\n")
    assert csv[0] == "b,a,y1,y2,y3"
    assert len(csv) == 9
    assert (out / "inertia_vs_b.svg").exists()
    first = np.array(csv[1].split(","), dtype=float)
    assert first[0] == 0.1  # b grid starts at the requested minimum
    assert first[1] > first[0]  # slaved a exceeds the small axis


def test_inertia_table_rejects_bad_grid(tmp_path, capsys):
    p = tmp_path / "table.toml"
    p.write_text("[inertia_table]\nb_min = 0.4\nb_max = 0.3\ncount = 8\n")
    assert main(["inertia-table", "--config", str(p)]) == 2


def test_steer_problem_from_toml_round_trip():
    text = _short_config_toml() + STEER_TABLE
    prob = steer_problem_from_toml(text)
    assert prob.n == 4
    assert prob.theta_d == 0.0
    assert prob.t_f_init == 1.0
    assert prob.t_f_bounds == (0.5, 2.0)
    assert prob.params.radius_policy is RadiusPolicy.MEAN_RADIUS
    np.testing.assert_allclose(prob.y_bounds[:, 0], [0.025, 0.05, 0.025])
    with pytest.raises(ConfigError):
        steer_problem_from_toml(_short_config_toml())  # no [steer] table
    with pytest.raises(ConfigError):
        steer_problem_from_toml(text.replace("n = 4", "n = 1"))


def test_steer_solves_and_reports(tmp_path, capsys):
    # rest start with a zero target: the initial guess is already the
    # optimum, so the full pipeline runs in well under a second
    text = _short_config_toml().replace(
        "spin_rate = 6.283185307179586", "spin_rate = 0.0"
    ) + STEER_TABLE
    p = tmp_path / "steer.toml"
    p.write_text(text)
    out = tmp_path / "out"
    assert main(["steer", "--config", str(p), "--out-dir", str(out)]) == 0
    report = json.loads((out / "steer_report.json").read_text())
    assert report["converged"] is True
    assert report["status"] == "converged"
    assert report["theta_d"] == 0.0
    assert abs(report["reintegrated_terminal_heading"]) < 1e-6
    assert (out / "steer_trajectory.csv").exists()
