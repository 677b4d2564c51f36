from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..agent import AgentConfig, run_episode, trace_lines
from ..envs import transcript
from ..pddl import PDDLError, parse_domain, parse_problem, validate_problem
from ..planner import NoPlan, ground, solve
from .config import ConfigError, load_config
from .suite import build_env, env_spec, make_translator, run_suite


def _suite_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML or JSON suite config; flags override it")
    p.add_argument("--env", choices=("coin", "cooking"))
    p.add_argument("--difficulty", choices=("easy", "hard"))
    p.add_argument("--rooms", type=int)
    p.add_argument("--step-cap", type=int)
    p.add_argument("--strategy", choices=("pddl-edit", "pddl-gen", "action-gen", "random"))
    p.add_argument("--translator", choices=("oracle", "faulty", "llm", "none"))
    p.add_argument("--max-retries", type=int)
    p.add_argument("--max-expansions", type=int)
    p.add_argument("--fault-probability", type=float)
    p.add_argument("--fault-kinds", help="comma-separated fault kinds")
    p.add_argument("--fault-seed", type=int)
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--temperature", type=float)
    p.add_argument("--cassette", help="cassette file or directory")
    p.add_argument("--cassette-mode", choices=("replay", "record"))


def _overrides(args: argparse.Namespace, *extra: str) -> dict:
    keys = [
        "env",
        "difficulty",
        "rooms",
        "step_cap",
        "strategy",
        "translator",
        "max_retries",
        "max_expansions",
        "fault_probability",
        "fault_seed",
        "endpoint",
        "model",
        "temperature",
        "cassette",
        "cassette_mode",
        *extra,
    ]
    out = {k: getattr(args, k, None) for k in keys}
    if getattr(args, "fault_kinds", None):
        out["fault_kinds"] = tuple(k.strip() for k in args.fault_kinds.split(","))
    if out.get("strategy") == "random" and out.get("translator") is None:
        out["translator"] = "none"
    return out


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, **_overrides(args, "seeds", "trials", "out", "parallel"))
    suite = run_suite(cfg)
    m = suite.metrics
    if not cfg.out:
        sys.stdout.write(suite.csv_text)
    sd = "n/a" if m.std_undefined else f"{m.std_steps:.2f}"
    print(
        f"{m.env}{'/' + m.difficulty if m.difficulty else ''} {m.strategy} [{m.translator}] "
        f"episodes={m.episodes} success={m.success_rate:.0%} steps={m.mean_steps:.2f}±{sd} "
        f"invalid={m.mean_invalid_steps:.2f}"
    )
    if cfg.out:
        print(f"wrote {Path(cfg.out) / 'summary.csv'}")
    return 0


def cmd_episode(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, **_overrides(args))
    spec = env_spec(cfg, args.seed)
    env = build_env(spec)
    result = run_episode(
        env,
        cfg.strategy,
        make_translator(cfg, args.seed, args.trial),
        AgentConfig(max_retries=cfg.max_retries, max_expansions=cfg.max_expansions, rng_seed=f"{args.seed}:{args.trial}"),
    )
    header = {"kind": "header", "trial": args.trial, "strategy": cfg.strategy, "translator": cfg.translator_label, **spec}
    if args.trace:
        Path(args.trace).write_text(trace_lines(result, header), encoding="utf-8")
    if args.show:
        for rec in result.trace:
            print(f"--- iteration {rec['iteration']} (retries {rec.get('retries', 0)})")
            if rec.get("goal"):
                print(f"goal: {rec['goal']}")
            for step in rec.get("plan", []):
                print(f"  plan {step}")
            for cmd, obs in zip(rec.get("commands", []), rec.get("observations", [])):
                print(f"< {cmd}\n> {obs}")
    else:
        sys.stdout.write(result.transcript)
    status = "success" if result.success else f"failure ({result.failure_reason})"
    print(f"{status}: steps={result.steps} invalid={result.invalid_steps} iterations={result.iterations}")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    df = parse_domain(Path(args.domain).read_text(encoding="utf-8"))
    pf = parse_problem(Path(args.problem).read_text(encoding="utf-8"))
    try:
        plan = solve(ground(df, pf), max_expansions=args.max_expansions, timeout=args.timeout, mode=args.mode)
    except NoPlan as exc:
        print(f"no plan: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(plan.to_text())
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    df = parse_domain(Path(args.domain).read_text(encoding="utf-8"))
    pf = parse_problem(Path(args.problem).read_text(encoding="utf-8"))
    diags = validate_problem(pf, df)
    for d in diags:
        print(d)
    if not diags:
        print("ok")
    return 1 if diags else 0


def cmd_replay(args: argparse.Namespace) -> int:
    lines = [json.loads(ln) for ln in Path(args.trace).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or lines[0].get("kind") != "header":
        print("trace has no header line", file=sys.stderr)
        return 2
    env = build_env(lines[0])
    commands = [c for rec in lines[1:] for c in rec.get("commands", [])]
    sys.stdout.write(transcript(env, commands))
    return 0


def cmd_gen_env(args: argparse.Namespace) -> int:
    env = build_env({"env": args.env, "seed": args.seed, "difficulty": args.difficulty, "rooms": args.rooms})
    print(env.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pddlego", description="Problem-file editing agents for text games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a seed sweep and write summary files")
    _suite_args(p)
    p.add_argument("--seeds", help='seed list such as "10..59" or "0,3,7"')
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--parallel", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("episode", help="play one episode and print its transcript")
    _suite_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--trace", help="write the JSON-lines trace here")
    p.add_argument("--show", action="store_true", help="pretty-print iterations instead of the raw transcript")
    p.set_defaults(func=cmd_episode)

    p = sub.add_parser("solve", help="plan for a domain and problem file")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--mode", choices=("bfs", "greedy"), default="bfs")
    p.add_argument("--max-expansions", type=int, default=500_000)
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a problem file against a domain")
    p.add_argument("domain")
    p.add_argument("problem")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("replay", help="rebuild the transcript recorded in a trace")
    p.add_argument("trace")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("gen-env", help="dump a generated environment as JSON")
    p.add_argument("--env", choices=("coin", "cooking"), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--difficulty", choices=("easy", "hard"))
    p.add_argument("--rooms", type=int)
    p.set_defaults(func=cmd_gen_env)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PDDLError, OSError, ValueError) as exc:
        print(f"pddlego {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
