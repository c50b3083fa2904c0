"""Command line interface.

Verbs: rollout, benchmark, train, evaluate, solve-cj, play.  Every run
writes its outputs plus a manifest.json into --out; rerunning with
--from-manifest reproduces the data files byte for byte.  The only
non-replayable cells are wall-clock ones (benchmark timings and the
curve.csv seconds column).

Exit codes: 0 success, 2 configuration or usage error, 3 simulation or
solver failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, replace
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import __version__
from . import config as cfg
from .agents import FixedSpreadAgent, RandomAgent
from .environment import ACTION_COLUMNS, TradingEnvironment
from .errors import ConfigError, SimulationError
from .learn import (
    TrainingDiverged,
    evaluate,
    rollout,
    train,
    _myopic_half_spread,
)
from .manifest import RunManifest, load_manifest, write_manifest

AGENT_NAMES = (
    "random", "fixed_action", "fixed_spread", "avellaneda_stoikov", "cartea_jaimungal",
)
BENCHMARK_SIZES = (1, 10, 100, 1000, 10000)
SPREAD_GRID_SIZE = 20


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    return repr(v)


def preset_names() -> list[str]:
    files = resources.files("mbtsim").joinpath("presets")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".toml"))


def resolve_config(name_or_path: str) -> tuple[str, str | None]:
    """Return (config text, source path) for a path or packaged preset name."""
    if os.path.exists(name_or_path):
        with open(name_or_path, "r", encoding="utf-8") as f:
            return f.read(), name_or_path
    stem = name_or_path.removesuffix(".toml")
    candidate = resources.files("mbtsim").joinpath("presets", f"{stem}.toml")
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8"), f"preset:{stem}"
    raise ConfigError(
        [f"config {name_or_path!r} is neither a file nor a preset; "
         f"presets: {', '.join(preset_names())}"]
    )


def _out_dir(args, verb: str) -> str:
    if args.out:
        path = args.out
    else:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
        path = os.path.join("runs", f"{verb}-{stamp}")
    os.makedirs(path, exist_ok=True)
    return path


def _episode_rollout_rows(env: TradingEnvironment, agent):
    """Run one episode batch, returning per-step rows for the CSV."""
    action_cols = ACTION_COLUMNS[env.config.action_type]
    obs = env.reset()
    n = env.config.num_trajectories
    rows = []
    total = np.zeros(n)
    for k in range(env.config.n_steps):
        actions = np.asarray(agent.get_action(obs), dtype=float)
        result = env.step(actions)
        total += result.rewards
        flags = [result.info["fill_bid"], result.info["fill_ask"],
                 result.info["arrival_bid"], result.info["arrival_ask"]]
        if "mo_buy" in result.info:
            flags += [result.info["mo_buy"], result.info["mo_sell"]]
        rows.append((k, actions, result, flags))
        obs = result.observations
    return rows, total


def write_rollout_csv(path: str, env: TradingEnvironment, rows) -> None:
    """Post-step snapshots, one row per (trajectory, step)."""
    action_cols = ACTION_COLUMNS[env.config.action_type]
    header = ["trajectory", "step", "time", "midprice", "cash", "inventory"]
    header += list(action_cols)
    header += ["reward", "fill_bid", "fill_ask", "arrival_bid", "arrival_ask"]
    if env.config.action_type == "limit_and_market":
        header += ["mo_buy", "mo_sell"]
    n = env.config.num_trajectories
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for traj in range(n):
            for k, actions, result, flags in rows:
                obs = result.observations[traj]
                record = [
                    str(traj), str(k), _fmt((k + 1) * env.dt), _fmt(obs[3]),
                    _fmt(obs[0]), str(int(obs[1])),
                ]
                record += [_fmt(a) for a in actions[traj]]
                record += [_fmt(result.rewards[traj])]
                record += [_fmt(flag[traj]) for flag in flags]
                writer.writerow(record)


def read_rollout_csv(path: str) -> dict[str, np.ndarray]:
    """Load a rollout CSV back into column arrays, validating the schema."""
    with open(path, "r", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        data = list(reader)
    required = {"trajectory", "step", "time", "midprice", "cash", "inventory", "reward"}
    missing = required - set(header)
    if missing:
        raise ValueError(f"rollout CSV is missing columns {sorted(missing)}")
    for row in data:
        if len(row) != len(header):
            raise ValueError("rollout CSV row width does not match the header")
    columns = {name: np.array([row[i] for row in data]) for i, name in enumerate(header)}
    out = {}
    for name, values in columns.items():
        if name in ("trajectory", "step", "inventory") or name.startswith(
            ("fill_", "arrival_", "mo_", "post_")
        ):
            out[name] = values.astype(np.int64)
        else:
            out[name] = values.astype(float)
    return out


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _spread_grid(env: TradingEnvironment) -> np.ndarray:
    top = min(2.5 * _myopic_half_spread(env.config), env.max_depth)
    return np.linspace(0.05, top, SPREAD_GRID_SIZE)


def compute_baselines(config, n_episodes: int, seed: int) -> dict:
    """Mean rewards of the closed-form, best fixed-spread and random agents."""
    probe = TradingEnvironment(replace(config, num_trajectories=1))
    cj_agent = cfg.build_agent(probe, "cartea_jaimungal", {})
    grid = _spread_grid(probe)
    spreads = []
    for s in grid:
        report = evaluate(
            config, FixedSpreadAgent(s, probe.action_dim), n_episodes, seed=seed
        )
        spreads.append({"half_spread": float(s), "mean_reward": report.mean_reward,
                        "std_error": report.std_error})
    best = max(spreads, key=lambda d: d["mean_reward"])
    cj_report = evaluate(config, cj_agent, n_episodes, seed=seed)
    random_report = evaluate(
        config, RandomAgent(probe, seed=seed), n_episodes, seed=seed
    )
    return {
        "cj": cj_report.mean_reward,
        "cj_se": cj_report.std_error,
        "fixed_best": best["mean_reward"],
        "fixed_best_se": best["std_error"],
        "fixed_best_half_spread": best["half_spread"],
        "random": random_report.mean_reward,
        "random_se": random_report.std_error,
        "n_episodes": n_episodes,
        "spread_grid": spreads,
    }


# -- verbs -------------------------------------------------------------------


def cmd_rollout(args, parsed) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.n_trajectories is not None:
        overrides["num_trajectories"] = args.n_trajectories
    config = cfg.build_environment_config(parsed, **overrides)
    env = TradingEnvironment(config)
    kind, params = cfg.agent_spec(parsed)
    if args.agent:
        kind, params = args.agent, (params if args.agent == kind else {})
    agent = cfg.build_agent(env, kind, params)
    rows, total = _episode_rollout_rows(env, agent)
    out = _out_dir(args, "rollout")
    csv_path = os.path.join(out, "rollout.csv")
    write_rollout_csv(csv_path, env, rows)
    se = float(total.std(ddof=1) / np.sqrt(total.size)) if total.size > 1 else 0.0
    _write_json(os.path.join(out, "summary.json"), {
        "agent": kind,
        "n_trajectories": config.num_trajectories,
        "n_steps": config.n_steps,
        "mean_reward": float(total.mean()),
        "std_error": se,
        "mean_terminal_inventory": float(env.inventory.mean()),
    })
    print(f"rollout: {config.num_trajectories} trajectories x {config.n_steps} steps, "
          f"mean reward {total.mean():.4f} +/- {se:.4f}")
    return _finish(args, out, "rollout", parsed,
                   {"agent": args.agent}, ["rollout.csv", "summary.json"])


def _looped_rollout(config, agent_builder, size: int, threads: int) -> float:
    """Time width-1 environments run one by one (optionally on a thread pool)."""

    def one(i: int) -> float:
        env = TradingEnvironment(
            replace(config, num_trajectories=1, substream_offset=i)
        )
        agent = agent_builder(env)
        return float(rollout(env, agent).returns[0])

    start = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(size)))
    else:
        for i in range(size):
            one(i)
    return time.perf_counter() - start


def cmd_benchmark(args, parsed) -> int:
    overrides = {"master_seed": args.seed} if args.seed is not None else {}
    config = cfg.build_environment_config(parsed, **overrides)
    sizes = sorted({int(s) for s in args.sizes.split(",")})
    bad = [s for s in sizes if s not in BENCHMARK_SIZES]
    if bad:
        raise ConfigError([f"benchmark sizes must be among {BENCHMARK_SIZES}, got {bad}"])
    threads = int(os.environ.get("MBT_THREADS", "1"))
    if threads < 1:
        raise ConfigError(["MBT_THREADS must be >= 1"])

    def agent_builder(env):
        return FixedSpreadAgent(_myopic_half_spread(config), env.action_dim)

    results = {}
    for size in sizes:
        batch_cfg = replace(config, num_trajectories=size)
        env = TradingEnvironment(batch_cfg)
        agent = agent_builder(env)
        start = time.perf_counter()
        rollout(env, agent)
        vectorized = time.perf_counter() - start
        looped = _looped_rollout(config, agent_builder, size, threads)
        results[str(size)] = {
            "vectorized_seconds": vectorized,
            "looped_seconds": looped,
            "speedup": looped / vectorized if vectorized > 0 else float("inf"),
        }
        print(f"n={size}: vectorized {vectorized:.4f}s, looped {looped:.4f}s, "
              f"speedup {results[str(size)]['speedup']:.1f}x")
    out = _out_dir(args, "benchmark")
    _write_json(os.path.join(out, "benchmark.json"),
                {"threads": threads, "n_steps": config.n_steps, "results": results})
    return _finish(args, out, "benchmark", parsed,
                   {"sizes": args.sizes}, ["benchmark.json"])


def cmd_train(args, parsed) -> int:
    config = cfg.build_environment_config(parsed)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.n_trajectories is not None:
        overrides["num_trajectories"] = args.n_trajectories
    if args.updates is not None:
        overrides["num_updates"] = args.updates
    train_config = cfg.build_train_config(parsed, **overrides)

    def progress(update, stats):
        if (update + 1) % 20 == 0:
            print(f"update {update + 1}: mean return {stats['mean_return']:.4f}")

    try:
        result = train(config, train_config, progress=progress)
    except TrainingDiverged as e:
        print(f"training diverged: {e}", file=sys.stderr)
        out = _out_dir(args, "train")
        _write_curve(os.path.join(out, "curve.csv"), e.curve, e.curve_seconds,
                     e.curve_std)
        _write_json(os.path.join(out, "summary.json"),
                    {"diverged": True, "reason": str(e)})
        _finish(args, out, "train", parsed, _train_options(args),
                ["curve.csv", "summary.json"])
        return 3
    out = _out_dir(args, "train")
    _write_curve(os.path.join(out, "curve.csv"), result.curve,
                 result.curve_seconds, result.curve_std)
    _write_json(os.path.join(out, "policy.json"), {
        "weights": result.policy.weights.tolist(),
        "log_std": result.policy.log_std.tolist(),
        "features": ["1", "inventory/max_inventory", "time_to_go/terminal_time",
                     "product"],
    })
    _write_json(os.path.join(out, "summary.json"), {
        "diverged": False,
        "updates": len(result.curve),
        "final_mean_return": result.curve[-1],
        "random_level": result.random_level,
        "wall_time_seconds": result.wall_time,
    })
    print(f"trained {len(result.curve)} updates in {result.wall_time:.1f}s; "
          f"final mean return {result.curve[-1]:.4f}")
    return _finish(args, out, "train", parsed, _train_options(args),
                   ["curve.csv", "policy.json", "summary.json"])


def _train_options(args) -> dict:
    return {"updates": args.updates}


def _write_curve(path: str, curve, seconds, stds) -> None:
    """One row per update; the seconds column is wall clock, not replayable."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["update", "seconds", "mean_return", "std_return"])
        for i, value in enumerate(curve):
            writer.writerow([str(i), _fmt(seconds[i]), _fmt(value),
                             _fmt(stds[i])])


def cmd_evaluate(args, parsed) -> int:
    config = cfg.build_environment_config(parsed)
    env = TradingEnvironment(replace(config, num_trajectories=1))
    kind, params = cfg.agent_spec(parsed)
    if args.agent:
        if args.agent not in AGENT_NAMES:
            raise ConfigError(
                [f"unknown agent {args.agent!r}; choose from {', '.join(AGENT_NAMES)}"]
            )
        kind, params = args.agent, (params if args.agent == kind else {})
    if args.policy:
        with open(args.policy, "r", encoding="utf-8") as f:
            payload = json.load(f)
        agent = cfg.build_policy_from_weights(env, payload["weights"], payload["log_std"])
        kind = "policy"
    else:
        agent = cfg.build_agent(env, kind, params)
    seed = args.seed if args.seed is not None else 0
    eval_seed = seed + 1_000_000_007
    baselines = None
    if not args.no_baselines:
        try:
            baselines = compute_baselines(config, args.episodes, eval_seed)
        except ConfigError as e:
            print(f"baselines unavailable: {e}", file=sys.stderr)
    report = evaluate(config, agent, args.episodes, seed=eval_seed,
                      baselines=baselines, agent_name=kind)
    out = _out_dir(args, "evaluate")
    _write_json(os.path.join(out, "evaluation.json"), asdict(report))
    score = ("n/a" if report.normalized_score is None
             else f"{report.normalized_score:.4f}")
    print(f"{kind}: mean reward {report.mean_reward:.4f} +/- {report.std_error:.4f} "
          f"over {report.n_episodes} episodes, normalized score {score}")
    return _finish(args, out, "evaluate", parsed,
                   {"agent": args.agent, "episodes": args.episodes,
                    "policy": args.policy, "no_baselines": args.no_baselines},
                   ["evaluation.json"])


def cmd_solve_cj(args, parsed) -> int:
    from .closed_form import cj_solve

    config = cfg.build_environment_config(parsed)
    params = cfg.cj_params_from_config(config)
    solution = cj_solve(params, config.n_steps, refine=args.refine)
    bid, ask = solution.half_spreads()
    h = solution.h()
    out = _out_dir(args, "solve-cj")
    path = os.path.join(out, "cj_solution.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["time", "inventory", "omega", "value", "delta_bid", "delta_ask"])
        for ti, t in enumerate(solution.times):
            for qi, q in enumerate(solution.inventories):
                writer.writerow([
                    _fmt(t), str(int(q)), _fmt(solution.omega[ti, qi]),
                    _fmt(h[ti, qi]), _fmt(bid[ti, qi]), _fmt(ask[ti, qi]),
                ])
    _write_json(os.path.join(out, "summary.json"), {
        "params": asdict(params), "n_steps": config.n_steps, "refine": args.refine,
    })
    print(f"solved quoting tables on {len(solution.times)} times x "
          f"{len(solution.inventories)} inventory levels")
    return _finish(args, out, "solve-cj", parsed,
                   {"refine": args.refine}, ["cj_solution.csv", "summary.json"])


def cmd_play(args, parsed) -> int:
    overrides = {"num_trajectories": 1}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    config = cfg.build_environment_config(parsed, **overrides)
    env = TradingEnvironment(config)
    action_cols = ACTION_COLUMNS[config.action_type]
    obs = env.reset()
    print(f"interactive episode: {config.n_steps} steps of {env.dt:.6g}; "
          f"enter {len(action_cols)} values ({' '.join(action_cols)}), or 'quit'")
    rows = []
    aborted = False
    for k in range(config.n_steps):
        o = obs[0]
        print(f"step {k}: time={o[2]:.6g} mid={o[3]:.6g} cash={o[0]:.6g} "
              f"inventory={int(o[1])}")
        while True:
            print("action> ", end="", flush=True)
            line = sys.stdin.readline()
            if not line or line.strip().lower() in ("quit", "q"):
                aborted = True
                break
            parts = line.split()
            try:
                values = [float(p) for p in parts]
                if len(values) != len(action_cols):
                    raise ValueError
                action = np.asarray([values])
                result = env.step(action)
                break
            except (ValueError, RuntimeError):
                print(f"could not parse {line.strip()!r}: "
                      f"need {len(action_cols)} values ({' '.join(action_cols)})")
        if aborted:
            break
        flags = [result.info["fill_bid"], result.info["fill_ask"],
                 result.info["arrival_bid"], result.info["arrival_ask"]]
        if "mo_buy" in result.info:
            flags += [result.info["mo_buy"], result.info["mo_sell"]]
        rows.append((k, action, result, flags))
        fills = int(result.info["fill_bid"][0]) + int(result.info["fill_ask"][0])
        print(f"  reward={result.rewards[0]:.6g} fills={fills}")
        obs = result.observations
    out = _out_dir(args, "play")
    write_rollout_csv(os.path.join(out, "transcript.csv"), env, rows)
    status = "aborted" if aborted else "complete"
    _write_json(os.path.join(out, "summary.json"), {
        "status": status,
        "steps_played": len(rows),
        "final_cash": float(env.cash[0]),
        "final_inventory": int(env.inventory[0]),
    })
    print(f"episode {status} after {len(rows)} steps; transcript in {out}")
    return _finish(args, out, "play", parsed, {}, ["transcript.csv", "summary.json"])


# -- wiring ------------------------------------------------------------------


def _finish(args, out_dir, verb, parsed, options, outputs) -> int:
    manifest = RunManifest(
        tool_version=__version__,
        verb=verb,
        command=list(args.raw_argv),
        config_text=parsed.text,
        config_path=parsed.path,
        seed=args.seed,
        n_trajectories=getattr(args, "n_trajectories", None),
        options={k: v for k, v in options.items() if v is not None},
        outputs=outputs,
        started_at=args.started_at,
        finished_at=datetime.now(timezone.utc).isoformat(),
    )
    write_manifest(out_dir, manifest)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file path or preset name")
    common.add_argument("--from-manifest", dest="from_manifest",
                        help="rerun an earlier run from its manifest")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--n-trajectories", dest="n_trajectories", type=int,
                        default=None)
    parser = argparse.ArgumentParser(
        prog="mbtsim",
        description="Vectorized market making simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("rollout", parents=[common]).add_argument(
        "--agent", choices=AGENT_NAMES, default=None)
    bench = sub.add_parser("benchmark", parents=[common])
    bench.add_argument("--sizes", default="1,10,100,1000")
    tr = sub.add_parser("train", parents=[common])
    tr.add_argument("--updates", type=int, default=None)
    ev = sub.add_parser("evaluate", parents=[common])
    ev.add_argument("--agent", default=None)
    ev.add_argument("--episodes", type=int, default=10_000)
    ev.add_argument("--policy", default=None, help="policy.json from train")
    ev.add_argument("--no-baselines", action="store_true")
    solve = sub.add_parser("solve-cj", parents=[common])
    solve.add_argument("--refine", type=int, default=10)
    sub.add_parser("play", parents=[common])
    return parser


_COMMANDS = {
    "rollout": cmd_rollout,
    "benchmark": cmd_benchmark,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "solve-cj": cmd_solve_cj,
    "play": cmd_play,
}


def _apply_manifest(args) -> "cfg.ParsedConfig":
    manifest = load_manifest(args.from_manifest)
    if manifest.verb != args.verb:
        raise ConfigError(
            [f"manifest records a {manifest.verb!r} run, not {args.verb!r}"]
        )
    if args.seed is None:
        args.seed = manifest.seed
    if args.n_trajectories is None:
        args.n_trajectories = manifest.n_trajectories
    for key, value in manifest.options.items():
        if getattr(args, key, None) in (None, False):
            setattr(args, key, value)
    return cfg.parse_config_text(manifest.config_text, manifest.config_path)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.raw_argv = argv
    args.started_at = datetime.now(timezone.utc).isoformat()
    try:
        if args.from_manifest:
            parsed = _apply_manifest(args)
        elif args.config:
            text, path = resolve_config(args.config)
            parsed = cfg.parse_config_text(text, path)
        else:
            raise ConfigError(["--config (or --from-manifest) is required"])
        return _COMMANDS[args.verb](args, parsed)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (FileNotFoundError, FileExistsError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SimulationError as e:
        print(f"simulation error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
