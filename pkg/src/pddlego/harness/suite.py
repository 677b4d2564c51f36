"""Seed sweeps, per-episode rows, and aggregate metrics."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..agent import AgentConfig, EpisodeResult, run_episode, trace_lines
from ..envs import make_env
from ..translator import (
    Cassette,
    FaultProfile,
    FaultyTranslator,
    LLMConfig,
    LLMTranslator,
    OracleTranslator,
    TranslatorError,
)
from .config import SuiteConfig

CSV_FIELDS = (
    "seed",
    "trial",
    "strategy",
    "translator",
    "success",
    "steps",
    "invalid_steps",
    "iterations",
    "retries",
    "failure_reason",
)


def make_translator(cfg: SuiteConfig, seed: int, trial: int):
    if cfg.strategy == "random":
        return None
    if cfg.translator == "oracle":
        return OracleTranslator()
    if cfg.translator == "faulty":
        profile = FaultProfile(cfg.fault_probability, cfg.fault_kinds, seed=f"{cfg.fault_seed}:{seed}:{trial}")
        return FaultyTranslator(profile)
    llm = LLMConfig(endpoint=cfg.endpoint, model=cfg.model, temperature=cfg.temperature)
    cassette = None
    if cfg.cassette:
        path = Path(cfg.cassette)
        if path.is_dir() or not path.suffix:
            path = path / f"{cfg.env}-{cfg.difficulty or 'default'}-{seed}-{trial}.jsonl"
        cassette = Cassette(path, cfg.cassette_mode)
    return LLMTranslator(llm, cassette=cassette)


def env_spec(cfg: SuiteConfig, seed: int) -> dict:
    return {"env": cfg.env, "difficulty": cfg.difficulty, "rooms": cfg.rooms, "step_cap": cfg.step_cap, "seed": seed}


def build_env(spec: dict):
    return make_env(spec["env"], spec["seed"], spec.get("difficulty"), spec.get("rooms"), spec.get("step_cap"))


def run_one(cfg: SuiteConfig, seed: int, trial: int) -> tuple[dict, EpisodeResult | None, str]:
    """One episode; transport or setup failures become failed rows, never exceptions."""
    spec = env_spec(cfg, seed)
    agent_cfg = AgentConfig(
        max_retries=cfg.max_retries,
        max_expansions=cfg.max_expansions,
        timeout=cfg.solver_timeout,
        rng_seed=f"{seed}:{trial}",
    )
    row = {
        "seed": seed,
        "trial": trial,
        "strategy": cfg.strategy,
        "translator": cfg.translator_label,
    }
    try:
        env = build_env(spec)
        result = run_episode(env, cfg.strategy, make_translator(cfg, seed, trial), agent_cfg)
    except (TranslatorError, OSError) as exc:
        row.update(success=0, steps=0, invalid_steps=0, iterations=0, retries=0)
        row["failure_reason"] = f"{type(exc).__name__}: {exc}"
        return row, None, ""
    row.update(
        success=int(result.success),
        steps=result.steps,
        invalid_steps=result.invalid_steps,
        iterations=result.iterations,
        retries=result.total_retries,
        failure_reason=result.failure_reason,
    )
    header = {"kind": "header", "trial": trial, "strategy": cfg.strategy, "translator": cfg.translator_label, **spec}
    return row, result, trace_lines(result, header)


def _job(args: tuple[SuiteConfig, int, int]) -> tuple[dict, EpisodeResult | None, str]:
    return run_one(*args)


@dataclass
class SeedStats:
    seed: int
    trials: int
    successes: int
    mean_steps: float
    std_steps: float
    std_undefined: bool
    step_counts: list[int]


@dataclass
class Metrics:
    env: str
    difficulty: str | None
    strategy: str
    translator: str
    episodes: int
    success_rate: float
    mean_steps: float
    std_steps: float
    std_undefined: bool
    mean_invalid_steps: float
    seeds: list[SeedStats] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    def seed(self, seed: int) -> SeedStats:
        for s in self.seeds:
            if s.seed == seed:
                return s
        raise KeyError(seed)

    def to_json(self) -> str:
        data = asdict(self)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def sample_std(values: list[float]) -> tuple[float, bool]:
    """Sample standard deviation, or (0.0, True) when fewer than two values exist."""
    if len(values) < 2:
        return 0.0, True
    return statistics.stdev(values), False


def _mean(values: list[float]) -> float:
    return statistics.fmean(values) if values else 0.0


def aggregate(cfg: SuiteConfig, rows: list[dict]) -> Metrics:
    rows = sorted(rows, key=lambda r: (r["seed"], r["trial"]))
    wins = [r["steps"] for r in rows if r["success"]]
    std, undefined = sample_std(wins)
    per_seed = []
    for seed in sorted({r["seed"] for r in rows}):
        mine = [r for r in rows if r["seed"] == seed]
        steps = [r["steps"] for r in mine if r["success"]]
        s_std, s_undef = sample_std(steps)
        per_seed.append(SeedStats(seed, len(mine), len(steps), _mean(steps), s_std, s_undef, [r["steps"] for r in mine]))
    return Metrics(
        env=cfg.env,
        difficulty=cfg.difficulty,
        strategy=cfg.strategy,
        translator=cfg.translator_label,
        episodes=len(rows),
        success_rate=len(wins) / len(rows) if rows else 0.0,
        mean_steps=_mean(wins),
        std_steps=std,
        std_undefined=undefined,
        mean_invalid_steps=_mean([r["invalid_steps"] for r in rows]),
        seeds=per_seed,
        rows=rows,
    )


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in sorted(rows, key=lambda r: (r["seed"], r["trial"])):
        writer.writerow(row)
    return buf.getvalue()


@dataclass
class SuiteRun:
    metrics: Metrics
    results: dict[tuple[int, int], EpisodeResult]
    csv_text: str


def run_suite(cfg: SuiteConfig) -> SuiteRun:
    """Run every (seed, trial) episode and aggregate; output order never depends on scheduling."""
    jobs = [(cfg, seed, trial) for seed in cfg.seeds for trial in range(cfg.trials)]
    if cfg.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            outputs = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.parallel))))
    else:
        outputs = [_job(j) for j in jobs]
    outputs.sort(key=lambda o: (o[0]["seed"], o[0]["trial"]))
    rows = [o[0] for o in outputs]
    results = {(o[0]["seed"], o[0]["trial"]): o[1] for o in outputs if o[1] is not None}
    metrics = aggregate(cfg, rows)
    csv_text = rows_to_csv(rows)
    if cfg.out:
        out = Path(cfg.out)
        (out / "traces").mkdir(parents=True, exist_ok=True)
        (out / "summary.csv").write_text(csv_text, encoding="utf-8")
        (out / "summary.json").write_text(metrics.to_json(), encoding="utf-8")
        (out / "config.json").write_text(json.dumps(cfg.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        for row, _, trace in outputs:
            if trace:
                (out / "traces" / f"{row['seed']}-{row['trial']}.jsonl").write_text(trace, encoding="utf-8")
    return SuiteRun(metrics, results, csv_text)


# -- comparison -----------------------------------------------------------------


class IncomparableSuites(ValueError):
    pass


@dataclass
class Report:
    gain: float
    mean_a: float
    mean_b: float
    common_seeds: list[int]
    table: list[dict]

    def render(self) -> str:
        lines = [f"{'seed':>6}  {'a (mean ± sd)':>16}  {'b (mean ± sd)':>16}"]
        for r in self.table:
            lines.append(f"{r['seed']:>6}  {r['a_mean']:>8.2f} ± {r['a_std']:<5.2f}  {r['b_mean']:>8.2f} ± {r['b_std']:<5.2f}")
        lines.append(f"common seeds: {len(self.common_seeds)}  mean a {self.mean_a:.2f}  mean b {self.mean_b:.2f}")
        lines.append(f"relative efficiency gain: {self.gain:+.1%}")
        return "\n".join(lines)


def compare(a: Metrics, b: Metrics) -> Report:
    """Efficiency of ``a`` relative to ``b``: 1 - steps(a) / steps(b) over seeds both solve."""
    seeds_a = {s.seed for s in a.seeds}
    seeds_b = {s.seed for s in b.seeds}
    if seeds_a != seeds_b or a.env != b.env or a.difficulty != b.difficulty:
        raise IncomparableSuites("suites differ in environment or seed set")
    common = sorted(s for s in seeds_a if a.seed(s).successes and b.seed(s).successes)
    if not common:
        raise IncomparableSuites("no seed is solved by both suites")
    steps_a = [r["steps"] for r in a.rows if r["success"] and r["seed"] in common]
    steps_b = [r["steps"] for r in b.rows if r["success"] and r["seed"] in common]
    mean_a, mean_b = _mean(steps_a), _mean(steps_b)
    table = [
        {
            "seed": s,
            "a_mean": a.seed(s).mean_steps,
            "a_std": a.seed(s).std_steps,
            "b_mean": b.seed(s).mean_steps,
            "b_std": b.seed(s).std_steps,
        }
        for s in common
    ]
    return Report(1.0 - mean_a / mean_b, mean_a, mean_b, common, table)
