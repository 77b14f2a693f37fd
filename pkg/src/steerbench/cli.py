"""Command-line workbench.

Batch work (training, evaluation, comparisons, DP solves, plots, report
rendering) runs in-process; ``serve`` starts the HTTP decision service and
``recommend`` is a thin client for it. Verbosity comes from the
STEERBENCH_LOG environment variable (DEBUG/INFO/WARNING; default WARNING)
and goes to stderr so stdout stays machine-readable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from .agents.dsdp import solve_cached
from .envs.metrics import trajectory_rows
from .harness.config import ConfigError, load_config
from .harness.evaluation import report_dict, report_row
from .harness.reporting import (
    write_report_csv,
    write_report_json,
    write_timing,
    write_trajectory_csv,
    write_trajectory_svg,
)
from .harness.training import env_step, start_episode
from .harness.workflows import (
    checkpoint_path,
    compare_agents,
    evaluate_agent,
    load_checkpoint,
    policy_for,
    train_multi_seed,
)

log = logging.getLogger(__name__)


def _setup_logging() -> None:
    level_name = os.environ.get("STEERBENCH_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        print(f"warning: unknown STEERBENCH_LOG level {level_name!r}", file=sys.stderr)
        level = logging.WARNING
    pkg_log = logging.getLogger("steerbench")
    pkg_log.setLevel(level)
    if not pkg_log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        pkg_log.addHandler(handler)
    pkg_log.propagate = False


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--env", choices=["env1", "env2"], help="environment override")
    parser.add_argument("--agent", help="agent override")
    parser.add_argument("--seeds", type=int, help="number of training seeds")
    parser.add_argument("--episodes", type=int, help="training episodes per seed")
    parser.add_argument("--eval-n", type=int, dest="eval_n", help="evaluation episodes")
    parser.add_argument("--eval-seed", type=int, dest="eval_seed", help="evaluation bank seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--v-prod", dest="v_prod", help="production value, or 'uniform'")
    parser.add_argument("--w1", type=float, help="boundary-reward weight")
    parser.add_argument("--w2", type=float, help="permeability-reward weight")
    parser.add_argument("--perm-low", type=float, dest="perm_low", help="low-zone permeability")


def _overrides(args: argparse.Namespace) -> dict:
    keys = ("env", "agent", "seeds", "episodes", "eval_n", "eval_seed", "out",
            "v_prod", "w1", "w2", "perm_low")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _load(args: argparse.Namespace):
    return load_config(args.config, _overrides(args))


def _print_reports(reports) -> None:
    cols = ["agent", "scenario", "mean_reward", "robust_reward", "mean_contact_pct", "mean_cost"]
    header = f"{'agent':<14} {'scenario':<28} {'reward':>10} {'robust':>10} {'contact%':>9} {'cost':>8}"
    print(header)
    print("-" * len(header))
    for rep in reports:
        row = report_row(rep)

        def num(key):
            v = row.get(key)
            return "" if v is None else f"{v:.3f}"

        print(
            f"{row['agent']:<14} {row['scenario']:<28} {num('mean_reward'):>10} "
            f"{num('robust_reward'):>10} {num('mean_contact_pct'):>9} {num('mean_cost'):>8}"
        )


def cmd_train(args: argparse.Namespace) -> int:
    config = _load(args)
    results = train_multi_seed(config)
    for seed, result in sorted(results.items()):
        tail = result.curve.reward[-100:]
        print(f"seed {seed}: trained {config.episodes} episodes, "
              f"final 100-episode mean reward {np.mean(tail):.3f}")
    print(f"checkpoints and curves.csv written to {config.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load(args)
    os.makedirs(config.out, exist_ok=True)
    t0 = time.perf_counter()
    report = evaluate_agent(config)
    elapsed = time.perf_counter() - t0
    write_report_csv(os.path.join(config.out, "report.csv"), [report_row(report)])
    write_report_json(os.path.join(config.out, "report.json"), {"reports": [report_dict(report)]})
    write_timing(os.path.join(config.out, "timing_eval.json"), {"evaluate_s": elapsed})
    _print_reports([report])
    print(f"report.csv and report.json written to {config.out}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    config = _load(args)
    agents = [a.strip() for a in args.agents.split(",") if a.strip()]
    if not agents:
        raise ConfigError("--agents needs at least one agent name")
    dirs = {}
    for pair in args.checkpoints or []:
        if "=" not in pair:
            raise ConfigError(f"--checkpoints wants agent=dir, got {pair!r}")
        name, path = pair.split("=", 1)
        dirs[name] = path
    os.makedirs(config.out, exist_ok=True)
    t0 = time.perf_counter()
    reports = compare_agents(config, agents, checkpoint_dirs=dirs)
    elapsed = time.perf_counter() - t0
    write_report_csv(os.path.join(config.out, "report.csv"), [report_row(r) for r in reports])
    write_report_json(
        os.path.join(config.out, "report.json"),
        {"reports": [report_dict(r) for r in reports]},
    )
    write_timing(os.path.join(config.out, "timing_eval.json"), {"compare_s": elapsed})
    _print_reports(reports)
    print(f"report.csv and report.json written to {config.out}")
    return 0


def cmd_dsdp_solve(args: argparse.Namespace) -> int:
    config = _load(args)
    if config.env != "env2":
        raise ConfigError("dsdp-solve applies to the faulted environment (env2)")
    if config.v_prod is None:
        raise ConfigError("dsdp-solve needs --v-prod (one policy per production value)")
    cache = os.path.join(config.out, "dsdp_cache")
    t0 = time.perf_counter()
    policy = solve_cached(
        config.faulted,
        config.costs,
        config.v_prod,
        cache,
        seed=config.dsdp_seed,
        bin_width=config.dsdp_bin_width,
        span=config.dsdp_span,
        mc=config.dsdp_mc,
    )
    elapsed = time.perf_counter() - t0
    print(f"policy over {policy.n_stages} stages x {len(policy.bin_centers)} bins "
          f"solved/loaded in {elapsed:.2f}s; cached under {cache}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    config = _load(args)
    os.makedirs(config.out, exist_ok=True)
    net = table = None
    if config.agent in ("dqn-sensor", "dqn-posterior", "qlearn"):
        seed = config.seed_list[0] if args.checkpoint is None else None
        path = args.checkpoint or checkpoint_path(config.out, seed)
        loaded = load_checkpoint(path)
        net, table = loaded.net, loaded.table
    policy = policy_for(config, net=net, table=table)
    k = args.realization
    geo_rng = np.random.default_rng(np.random.SeedSequence((config.eval_seed, k)))
    policy_rng = np.random.default_rng(np.random.SeedSequence((config.eval_seed, k, 1)))
    state = start_episode(config, geo_rng)
    while not state.done:
        state, _ = env_step(config, state, policy(state, policy_rng))
    out_path = os.path.join(config.out, f"trajectory_{config.agent}_{k}.svg")
    title = f"{config.env} {config.agent} realization {k} reward {state.total_reward:.3f}"
    write_trajectory_svg(out_path, state.real, state.tvds, title)
    csv_path = os.path.join(config.out, f"trajectory_{config.agent}_{k}.csv")
    write_trajectory_csv(csv_path, trajectory_rows(state))
    print(out_path)
    print(csv_path)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = _load(args)
    path = args.json or os.path.join(config.out, "report.json")
    with open(path) as fh:
        payload = json.load(fh)
    rows = []
    for rep in payload.get("reports", []):
        rows.append({
            "env": rep["env"],
            "agent": rep["agent"],
            "scenario": rep["scenario"],
            "n_seeds": len(rep.get("seeds", [])),
            "n_episodes": rep["n_episodes"],
            "mean_reward": rep["mean_reward"],
            "robust_reward": rep.get("robust_reward"),
            "mean_contact_pct": rep["mean_contact_pct"],
            "mean_hq_pct": rep.get("mean_hq_pct"),
            "mean_cost": rep.get("mean_cost"),
            "mean_value": rep.get("mean_value"),
            "mean_sidetracks": rep.get("mean_sidetracks"),
        })
    out_csv = os.path.join(config.out, "report.csv")
    write_report_csv(out_csv, rows)
    for row in rows:
        reward = row["mean_reward"]
        print(f"{row['agent']:<14} {row['scenario']:<28} reward {reward:.3f}")
    print(f"rendered {out_csv}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(checkpoint_dir=args.checkpoint_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    import httpx

    obs = [float(tok) for tok in args.obs.split(",")]
    body = {"name": args.name, "observation": obs}
    if args.legal:
        body["legal"] = [tok.strip() in ("1", "true") for tok in args.legal.split(",")]
    response = httpx.post(f"{args.url.rstrip('/')}/decide", json=body, timeout=10.0)
    response.raise_for_status()
    print(json.dumps(response.json(), sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steerbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a learning agent across seeds")
    _add_common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate one agent on the shared realization bank")
    _add_common(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("compare", help="evaluate several agents side by side")
    _add_common(p)
    p.add_argument("--agents", required=True, help="comma-separated agent names")
    p.add_argument("--checkpoints", nargs="*", help="agent=dir pairs for learned agents")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("dsdp-solve", help="solve (and cache) the DP policy for one v_prod")
    _add_common(p)
    p.set_defaults(fn=cmd_dsdp_solve)

    p = sub.add_parser("plot", help="roll one episode and write its trajectory SVG")
    _add_common(p)
    p.add_argument("--realization", type=int, default=0, help="index into the eval bank")
    p.add_argument("--checkpoint", help="explicit checkpoint file for learned agents")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("report", help="render report.json to report.csv and a console table")
    _add_common(p)
    p.add_argument("--json", help="input report.json (default: <out>/report.json)")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("serve", help="start the decision-support HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--checkpoint-dir", dest="checkpoint_dir", help="preload checkpoints from here")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("recommend", help="ask a running service for the next action")
    p.add_argument("--url", default="http://127.0.0.1:8000")
    p.add_argument("--name", required=True, help="loaded agent name on the server")
    p.add_argument("--obs", required=True, help="comma-separated observation values")
    p.add_argument("--legal", help="comma-separated legal flags (1/0)")
    p.set_defaults(fn=cmd_recommend)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
