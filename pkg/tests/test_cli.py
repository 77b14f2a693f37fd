"""Command-line workflows, end to end on miniature runs."""

from __future__ import annotations

import json
import os

import pytest

from steerbench.cli import build_parser, main


def _run(*argv):
    return main(list(argv))


def _tiny_train_args(out, agent="qlearn", episodes="40", seeds="2"):
    return [
        "train",
        "--env", "env2",
        "--agent", agent,
        "--episodes", episodes,
        "--seeds", seeds,
        "--v-prod", "2.0",
        "--out", out,
    ]


def test_parser_knows_all_subcommands():
    parser = build_parser()
    for cmd in ("train", "evaluate", "compare", "dsdp-solve", "plot", "report", "serve", "recommend"):
        args = parser.parse_args([cmd] + (
            ["--agents", "greedy"] if cmd == "compare"
            else ["--name", "x", "--obs", "1"] if cmd == "recommend"
            else []
        ))
        assert args.fn is not None


def test_train_writes_artifacts(tmp_path, capsys):
    out = str(tmp_path / "run")
    assert _run(*_tiny_train_args(out)) == 0
    assert os.path.exists(os.path.join(out, "checkpoint_0.bin"))
    assert os.path.exists(os.path.join(out, "checkpoint_1.bin"))
    assert os.path.exists(os.path.join(out, "curves.csv"))
    assert os.path.exists(os.path.join(out, "timing.json"))
    assert "seed 0" in capsys.readouterr().out


def test_evaluate_greedy_writes_reports(tmp_path, capsys):
    out = str(tmp_path / "eval")
    code = _run(
        "evaluate", "--env", "env2", "--agent", "greedy",
        "--eval-n", "5", "--v-prod", "2.0", "--out", out,
    )
    assert code == 0
    report = json.load(open(os.path.join(out, "report.json")))
    assert report["schema_version"] == 1
    assert report["reports"][0]["agent"] == "greedy"
    assert report["reports"][0]["n_episodes"] == 5
    csv_lines = open(os.path.join(out, "report.csv")).read().splitlines()
    assert len(csv_lines) == 2
    assert os.path.exists(os.path.join(out, "timing_eval.json"))


def test_evaluate_learned_agent_from_checkpoints(tmp_path):
    out = str(tmp_path / "run")
    _run(*_tiny_train_args(out))
    code = _run(
        "evaluate", "--env", "env2", "--agent", "qlearn",
        "--eval-n", "4", "--seeds", "2", "--v-prod", "2.0",
        "--episodes", "40", "--out", out,
    )
    assert code == 0
    report = json.load(open(os.path.join(out, "report.json")))
    assert report["reports"][0]["robust_reward"] is not None


def test_compare_pairs_agents(tmp_path):
    out = str(tmp_path / "cmp")
    code = _run(
        "compare", "--env", "env2", "--agents", "greedy,dsdp",
        "--eval-n", "4", "--v-prod", "2.0", "--out", out,
    )
    assert code == 0
    rows = open(os.path.join(out, "report.csv")).read().splitlines()
    assert len(rows) == 3
    assert rows[1].startswith("env2,greedy")
    assert rows[2].startswith("env2,dsdp")


def test_dsdp_solve_caches_policy(tmp_path, capsys):
    out = str(tmp_path / "dp")
    code = _run("dsdp-solve", "--env", "env2", "--v-prod", "2.0", "--out", out)
    assert code == 0
    cache = os.path.join(out, "dsdp_cache")
    assert len(os.listdir(cache)) == 1
    # Second run hits the cache and keeps the file byte-identical.
    path = os.path.join(cache, os.listdir(cache)[0])
    before = open(path, "rb").read()
    assert _run("dsdp-solve", "--env", "env2", "--v-prod", "2.0", "--out", out) == 0
    assert open(path, "rb").read() == before


def test_plot_writes_svg(tmp_path):
    out = str(tmp_path / "plots")
    code = _run(
        "plot", "--env", "env2", "--agent", "greedy",
        "--v-prod", "2.0", "--realization", "3", "--out", out,
    )
    assert code == 0
    svg = os.path.join(out, "trajectory_greedy_3.svg")
    assert open(svg).read().startswith("<svg ")


def test_plot_learned_agent_needs_checkpoint(tmp_path):
    out = str(tmp_path / "run")
    _run(*_tiny_train_args(out, seeds="1"))
    code = _run(
        "plot", "--env", "env2", "--agent", "qlearn", "--v-prod", "2.0",
        "--seeds", "1", "--episodes", "40", "--out", out,
    )
    assert code == 0
    assert os.path.exists(os.path.join(out, "trajectory_qlearn_0.svg"))


def test_report_renders_existing_json(tmp_path, capsys):
    out = str(tmp_path / "eval")
    _run(
        "evaluate", "--env", "env2", "--agent", "greedy",
        "--eval-n", "3", "--v-prod", "2.0", "--out", out,
    )
    csv_path = os.path.join(out, "report.csv")
    before = open(csv_path).read()
    os.remove(csv_path)
    assert _run("report", "--out", out) == 0
    assert open(csv_path).read() == before
    assert "greedy" in capsys.readouterr().out


def test_config_file_plus_flag_overrides(tmp_path):
    ini = tmp_path / "exp.ini"
    ini.write_text(
        "[env]\nenv = env2\nv_prod = 2.0\n\n[harness]\neval_n = 3\nout = IGNORED\n"
    )
    out = str(tmp_path / "o")
    code = _run(
        "evaluate", "--config", str(ini), "--agent", "greedy", "--out", out
    )
    assert code == 0
    assert os.path.exists(os.path.join(out, "report.csv"))


def test_bad_config_key_exits_2(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[agent]\nbogus = 1\n")
    assert _run("evaluate", "--config", str(ini)) == 2
    assert "bogus" in capsys.readouterr().err


def test_unknown_agent_exits_2(capsys):
    assert _run("evaluate", "--agent", "alphazero") == 2


def test_missing_report_json_exits_1(tmp_path):
    assert _run("report", "--out", str(tmp_path / "empty")) == 1


def test_dsdp_solve_requires_env2(capsys):
    assert _run("dsdp-solve", "--env", "env1") == 2


def test_log_env_var_sets_verbosity(tmp_path, monkeypatch, capsys):
    import logging

    monkeypatch.setenv("STEERBENCH_LOG", "debug")
    out = str(tmp_path / "o")
    _run(
        "evaluate", "--env", "env2", "--agent", "greedy",
        "--eval-n", "2", "--v-prod", "2.0", "--out", out,
    )
    assert logging.getLogger("steerbench").level == logging.DEBUG
