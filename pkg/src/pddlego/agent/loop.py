"""The episode driver: refine the problem file, pick a goal, plan, act."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

from ..edit import MalformedDelta, apply_delta, parse_delta_json, set_goal, visited_violations
from ..envs.base import StepStatus, TextEnv
from ..envs.cooking import RECIPE_HEADER, parse_recipe
from ..pddl import (
    EMPTY_GOAL,
    DomainFile,
    PDDLError,
    ProblemFile,
    load_domain,
    parse_problem,
    print_problem,
    validate_problem,
)
from ..planner import NoPlan, Plan, ground, solve, validate_plan
from ..translator.base import (
    BudgetExceeded,
    Mode,
    TranslatorError,
    TranslatorRequest,
    format_exchange,
)
from ..translator.oracle import pddl_name
from .commands import MissingDirection, ground_action_to_command, order_plan
from .subgoals import Knowledge, build_subgoals, current_room, held, located, needed_items, recipe_goal

MAX_RETRIES = 5


class Strategy(str, Enum):
    ACTION_GEN = "action-gen"
    PDDL_GEN = "pddl-gen"
    PDDL_EDIT = "pddl-edit"
    RANDOM = "random"


class RetryableFailure(Exception):
    """A translator answer the agent cannot use; triggers a re-query."""


@dataclass(frozen=True)
class AgentConfig:
    max_retries: int = MAX_RETRIES
    max_expansions: int = 200_000
    timeout: float | None = None
    search: str = "bfs"
    rng_seed: str = "0"


@dataclass
class EpisodeResult:
    success: bool
    steps: int
    invalid_steps: int
    iterations: int
    retries: list[int]
    final_problem: str
    transcript: str
    failure_reason: str = ""
    trace: list[dict] = field(default_factory=list)
    visited_counts: list[int] = field(default_factory=list)

    @property
    def total_retries(self) -> int:
        return sum(self.retries)


class _Episode:
    def __init__(self, env: TextEnv, strategy: Strategy, translator, cfg: AgentConfig, domain: DomainFile | None):
        self.env = env
        self.strategy = Strategy(strategy)
        self.translator = translator
        self.cfg = cfg
        self.kind = env.kind
        self.domain = domain or load_domain(self.kind)
        self.stack = build_subgoals(self.kind)
        self.knowledge = Knowledge(self.kind)
        self.pf: ProblemFile | None = None
        self.log: list[str] = []
        self.pending: list[str] = []
        self.retries: list[int] = []
        self.trace: list[dict] = []
        self.visited_counts: list[int] = []
        self.opened: set[tuple[str, str]] = set()
        self.meal_prepared = False
        self.last_obs = env.observe()
        first = format_exchange(None, self.last_obs.text)
        self.log.append(first)
        self.pending.append(first)

    # -- env interaction --------------------------------------------------

    def act(self, command: str) -> StepStatus:
        obs, status = self.env.step(command)
        self.last_obs = obs
        exchange = format_exchange(command, obs.text)
        self.log.append(exchange)
        self.pending.append(exchange)
        if command == "examine cookbook" and obs.text.startswith(RECIPE_HEADER):
            self.knowledge.recipe = parse_recipe(obs.text)
        if command == "prepare meal" and status == StepStatus.OK:
            self.meal_prepared = True
        if command.startswith("open ") and not command.startswith("open door") and status == StepStatus.OK:
            self.opened.add((current_room(self.pf) if self.pf else "", command[5:]))
        return status

    @property
    def done(self) -> bool:
        return self.env.terminal != "ongoing"

    # -- refinement -------------------------------------------------------

    def refine(self) -> tuple[ProblemFile, list[str]]:
        observation = "".join(self.pending)
        prior_text = print_problem(self.pf) if self.pf is not None else None
        mode = Mode.DELTA if self.strategy == Strategy.PDDL_EDIT and self.pf is not None else Mode.INIT
        try:
            response = self.translator.translate(
                TranslatorRequest(mode, observation, problem=prior_text, domain=self.kind)
            )
        except BudgetExceeded:
            raise
        except TranslatorError as exc:
            raise RetryableFailure(f"{type(exc).__name__}: {exc}") from exc
        warnings: list[str] = []
        try:
            if mode == Mode.DELTA:
                delta = parse_delta_json(response.text)
                bad = visited_violations(delta)
                if bad:
                    raise RetryableFailure(f"delta deletes visited facts: {bad}")
                new = apply_delta(self.pf, delta, warnings)
            else:
                new = parse_problem(response.text)
                if self.pf is not None:
                    lost = {a for a in self.pf.init if a.predicate == "visited"} - new.init
                    if lost:
                        raise RetryableFailure(f"regenerated problem drops visited facts: {sorted(map(str, lost))}")
        except (MalformedDelta, PDDLError) as exc:
            raise RetryableFailure(f"{type(exc).__name__}: {exc}") from exc
        new = new.replace(goal=EMPTY_GOAL)
        diagnostics = validate_problem(new, self.domain)
        if diagnostics:
            raise RetryableFailure("invalid problem file: " + "; ".join(map(str, diagnostics[:3])))
        if len(new.facts("at")) != 1:
            raise RetryableFailure(f"expected exactly one at fact, found {len(new.facts('at'))}")
        return new, [str(w) for w in warnings]

    # -- decisions --------------------------------------------------------

    def mechanical(self, pf: ProblemFile) -> str | None:
        valid = self.last_obs.valid_actions
        if "take coin" in valid:
            return "take coin"
        if self.kind != "cooking":
            return None
        if "eat meal" in valid:
            return "eat meal"
        recipe = self.knowledge.recipe
        if recipe is None:
            return "examine cookbook" if "examine cookbook" in valid else None
        needed = needed_items(recipe)
        have = held(pf)
        for act in valid:
            if act.startswith("take ") and pddl_name(act[5:]) in needed and pddl_name(act[5:]) not in have:
                return act
        here = current_room(pf)
        where = located(pf)
        missing = [i for i in needed if i not in have and i not in where]
        if missing:
            for act in valid:
                if act.startswith("open ") and not act.startswith("open door") and (here, act[5:]) not in self.opened:
                    return act
        if here == "kitchen" and not self.meal_prepared and "prepare meal" in valid:
            state = pf.init
            if all(i in have for i in needed if i != "knife") and all(
                a in state for a in recipe_goal(recipe).parts
            ):
                return "prepare meal"
        return None

    def plan(self, pf: ProblemFile) -> tuple[str, Plan, list[str], ProblemFile]:
        task = ground(self.domain, pf)
        tried = []
        for name, goal in self.stack.goals(pf, self.knowledge):
            try:
                plan = solve(task.with_goal(goal), self.cfg.max_expansions, self.cfg.timeout, self.cfg.search)
            except NoPlan as exc:
                tried.append(f"{name}: {exc}")
                continue
            if not plan.steps:
                tried.append(f"{name}: already satisfied")
                continue
            if self.kind == "cooking":
                plan = order_plan(plan, self.knowledge.recipe)
            check = validate_plan(task.with_goal(goal), plan)
            if not check:
                raise RetryableFailure(f"plan failed validation: {check.reason}")
            try:
                commands = [ground_action_to_command(a, pf) for a in plan]
            except MissingDirection as exc:
                raise RetryableFailure(f"MissingDirection: {exc}") from exc
            return name, plan, commands, set_goal(pf, goal)
        raise RetryableFailure("no sub-goal is plannable (" + "; ".join(tried) + ")")

    # -- main loops -------------------------------------------------------

    def run_planning(self) -> str:
        iteration = 0
        while not self.done:
            iteration += 1
            record: dict = {"iteration": iteration}
            attempts = 0
            last_error = ""
            while True:
                try:
                    pf, warnings = self.refine()
                    action = self.mechanical(pf)
                    if action is None:
                        goal_name, plan, commands, pf = self.plan(pf)
                    break
                except RetryableFailure as exc:
                    last_error = str(exc)
                    attempts += 1
                    if attempts > self.cfg.max_retries:
                        self.retries.append(attempts - 1)
                        record.update(retries=attempts - 1, error=last_error)
                        self.trace.append(record)
                        return f"RetriesExhausted: {last_error}"
                except BudgetExceeded as exc:
                    self.retries.append(attempts)
                    return f"BudgetExceeded: {exc}"
            self.retries.append(attempts)
            self.pf = pf
            self.pending = []
            self.visited_counts.append(len(pf.facts("visited")))
            record.update(problem=print_problem(pf), retries=attempts, warnings=warnings)
            if last_error:
                record["last_error"] = last_error
            if action is not None:
                record.update(goal=None, plan=[], commands=[action])
                self.act(action)
                record["observations"] = [self.last_obs.text]
                self.trace.append(record)
                continue
            record.update(goal=f"{goal_name}: {pf.goal}", plan=[str(a) for a in plan], commands=[])
            observations = []
            for command in commands:
                status = self.act(command)
                record["commands"].append(command)
                observations.append(self.last_obs.text)
                if status == StepStatus.INVALID or self.done:
                    break
            record["observations"] = observations
            self.trace.append(record)
        return ""

    def run_action_gen(self) -> str:
        history: list[str] = []
        latest = self.log[0]
        while not self.done:
            attempts = 0
            while True:
                try:
                    response = self.translator.translate(
                        TranslatorRequest(
                            Mode.ACTION,
                            latest,
                            history=tuple(history),
                            valid_actions=self.last_obs.valid_actions,
                            domain=self.kind,
                        )
                    )
                    command = response.text.strip()
                    if not command:
                        raise RetryableFailure("empty action")
                    break
                except BudgetExceeded as exc:
                    self.retries.append(attempts)
                    return f"BudgetExceeded: {exc}"
                except (TranslatorError, RetryableFailure) as exc:
                    attempts += 1
                    if attempts > self.cfg.max_retries:
                        self.retries.append(attempts - 1)
                        return f"RetriesExhausted: {exc}"
            self.retries.append(attempts)
            history.append(latest)
            self.act(command)
            latest = self.log[-1]
            self.trace.append({"iteration": len(self.retries), "commands": [command], "observations": [self.last_obs.text], "retries": attempts})
        return ""

    def run_random(self) -> str:
        rng = random.Random(f"random:{self.cfg.rng_seed}")
        while not self.done:
            command = rng.choice(self.last_obs.valid_actions)
            self.retries.append(0)
            self.act(command)
        return ""

    def run(self) -> EpisodeResult:
        if self.strategy == Strategy.RANDOM:
            reason = self.run_random()
        elif self.strategy == Strategy.ACTION_GEN:
            reason = self.run_action_gen()
        else:
            reason = self.run_planning()
        success = self.env.terminal == "success"
        if not reason and not success:
            reason = self.env.reason or "episode ended without success"
        return EpisodeResult(
            success=success,
            steps=self.env.steps_taken,
            invalid_steps=self.env.invalid_steps,
            iterations=len(self.retries),
            retries=list(self.retries),
            final_problem=print_problem(self.pf) if self.pf is not None else "",
            transcript="".join(self.log),
            failure_reason="" if success else reason,
            trace=self.trace,
            visited_counts=self.visited_counts,
        )


def run_episode(
    env: TextEnv,
    strategy: Strategy | str,
    translator=None,
    cfg: AgentConfig | None = None,
    domain: DomainFile | None = None,
) -> EpisodeResult:
    """Play one episode to a terminal observation or the env's step cap."""
    return _Episode(env, Strategy(strategy), translator, cfg or AgentConfig(), domain).run()


def trace_lines(result: EpisodeResult, header: dict | None = None) -> str:
    lines = [json.dumps(header, sort_keys=True)] if header is not None else []
    lines.extend(json.dumps(rec, sort_keys=True) for rec in result.trace)
    return "\n".join(lines) + "\n"
