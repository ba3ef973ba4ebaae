import json

import pytest

from qarx.cli import main
from test_experiment import write_config

HYPOTHESIS_BLOCK = dict(
    coef_bound=1.0, max_ar_order=3, max_exo_order=3, step=0.001,
    excitation_floor_ar=1.0, excitation_floor_exo=1.0,
    growth_cap_ar=10.0, growth_cap_exo=10.0,
    error_cap_ar=1.0, error_cap_exo=1.0,
    trailing_ar_sq=0.01, trailing_exo_sq=1.0,
    lower_margin_ar=0.001, lower_margin_exo=0.0005,
    upper_shrink_ar=0.5, upper_shrink_exo=0.5,
)


def test_run_writes_artifacts(tmp_path, capsys):
    config_path = write_config(tmp_path)
    assert main(["run", "--config", str(config_path)]) == 0
    out = tmp_path / "out"
    for name in ("orders.csv", "criteria.csv", "config.json", "summary.csv"):
        assert (out / name).exists()
    captured = capsys.readouterr().out
    assert "modal p" in captured
    assert "orders.csv" in captured


def test_run_invalid_config_exits_one(tmp_path, capsys):
    config_path = write_config(tmp_path, overrides={"trials": 0})
    assert main(["run", "--config", str(config_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_run_missing_config_exits_one(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 1
    assert "error:" in capsys.readouterr().err


def test_run_unwritable_output_exits_two(tmp_path, capsys):
    config_path = write_config(tmp_path, output_dir="/proc/qarx-no-such-dir/out")
    assert main(["run", "--config", str(config_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_summarize_reaggregates(tmp_path, capsys):
    config_path = write_config(tmp_path)
    main(["run", "--config", str(config_path)])
    (tmp_path / "out" / "summary.csv").unlink()
    assert main(["summarize", "--dir", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "summary.csv").exists()
    assert "modal p" in capsys.readouterr().out


def test_summarize_missing_dir_exits_two(tmp_path, capsys):
    assert main(["summarize", "--dir", str(tmp_path / "nowhere")]) == 2
    assert "error:" in capsys.readouterr().err


def test_feasibility_report(tmp_path, capsys):
    config_path = write_config(tmp_path, overrides={"hypothesis": HYPOTHESIS_BLOCK})
    assert main(["feasibility", "--config", str(config_path)]) == 0
    out = capsys.readouterr().out
    assert "axis p: lo=0.021 hi=-0.067 feasible=no" in out
    assert "axis q: lo=0.0205 hi=0.098 feasible=yes" in out
    # configured slope 0.006 sits below this hypothesis's lower bound
    assert "below lo" in out


def test_feasibility_requires_hypothesis(tmp_path, capsys):
    config_path = write_config(tmp_path)
    assert main(["feasibility", "--config", str(config_path)]) == 1
    assert "hypothesis" in capsys.readouterr().err


def test_plot_renders_figures(tmp_path, capsys):
    config_path = write_config(tmp_path)
    main(["run", "--config", str(config_path)])
    assert main(["plot", "--dir", str(tmp_path / "out")]) == 0
    for name in ("ar_order_trajectories.png", "exo_order_trajectories.png"):
        path = tmp_path / "out" / name
        assert path.exists() and path.stat().st_size > 0


def test_plot_separate_output_dir(tmp_path):
    config_path = write_config(tmp_path)
    main(["run", "--config", str(config_path)])
    figures = tmp_path / "figs"
    assert main(["plot", "--dir", str(tmp_path / "out"), "--out", str(figures)]) == 0
    assert (figures / "ar_order_trajectories.png").exists()


def test_plot_missing_dir_exits_two(tmp_path, capsys):
    assert main(["plot", "--dir", str(tmp_path / "nothing")]) == 2
    assert "error:" in capsys.readouterr().err
