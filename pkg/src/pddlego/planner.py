"""Grounding, breadth-first forward search and plan validation.

States are Python ints used as bitsets over the fluent facts. Facts whose
predicate never appears in an action effect (``connected``, ``obj_at``,
``have``, ...) are static: they are evaluated once against the initial
state and compiled out of the search.
"""

from __future__ import annotations

import heapq
import itertools
import time
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .pddl import (
    And,
    Atom,
    Condition,
    DomainFile,
    Not,
    Or,
    PDDLError,
    ProblemFile,
    iter_atoms,
    substitute,
)

DEFAULT_MAX_INSTANCES = 10**6
DEFAULT_MAX_EXPANSIONS = 500_000
MAX_DNF_CLAUSES = 20_000


class GroundingExplosion(PDDLError):
    pass


class NoPlan(PDDLError):
    """Base for the two ways `solve` can come back empty-handed."""


class Unsolvable(NoPlan):
    pass


class ResourceExhausted(NoPlan):
    pass


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    precondition: Condition
    add: frozenset[Atom]
    delete: frozenset[Atom]

    def __str__(self) -> str:
        return f"({self.name} {' '.join(self.args)})" if self.args else f"({self.name})"

    @property
    def sort_key(self) -> tuple:
        return (self.name, self.args)


@dataclass(frozen=True)
class GroundTask:
    facts: tuple[Atom, ...]
    actions: tuple[GroundAction, ...]
    init: frozenset[int]
    goal: Condition

    @cached_property
    def index(self) -> dict[Atom, int]:
        return {f: i for i, f in enumerate(self.facts)}

    def init_atoms(self) -> frozenset[Atom]:
        return frozenset(self.facts[i] for i in self.init)

    def with_goal(self, goal: Condition) -> GroundTask:
        extra = [a for a in iter_atoms(goal) if a not in self.index]
        facts = self.facts + tuple(sorted(set(extra)))
        return GroundTask(facts, self.actions, self.init, goal)


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def to_text(self) -> str:
        return "".join(f"{s}\n" for s in self.steps)


@dataclass(frozen=True)
class PlanCheck:
    ok: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def ground(df: DomainFile, pf: ProblemFile, max_instances: int = DEFAULT_MAX_INSTANCES) -> GroundTask:
    """Instantiate every schema with all type-consistent tuples of distinct objects."""
    types = {o.name: o.typ for o in pf.objects}
    candidates: dict[str, list[str]] = {}

    def objects_for(typ: str) -> list[str]:
        if typ not in candidates:
            candidates[typ] = sorted(n for n, t in types.items() if df.is_subtype(t, typ))
        return candidates[typ]

    total = 0
    for schema in df.actions:
        n = 1
        for p in schema.parameters:
            n *= len(objects_for(p.typ))
        total += n
    if total > max_instances:
        raise GroundingExplosion(f"{total} candidate instantiations exceed the cap of {max_instances}")

    actions: list[GroundAction] = []
    for schema in df.actions:
        pools = [objects_for(p.typ) for p in schema.parameters]
        for combo in itertools.product(*pools):
            if len(set(combo)) != len(combo):
                continue
            binding = {p.name: c for p, c in zip(schema.parameters, combo)}
            adds = frozenset(e.atom.substitute(binding) for e in schema.effects if e.positive)
            dels = frozenset(e.atom.substitute(binding) for e in schema.effects if not e.positive) - adds
            actions.append(GroundAction(schema.name, tuple(combo), substitute(schema.precondition, binding), adds, dels))
    actions.sort(key=lambda a: a.sort_key)

    universe: set[Atom] = set(pf.init)
    universe.update(iter_atoms(pf.goal))
    for a in actions:
        universe.update(iter_atoms(a.precondition))
        universe.update(a.add)
        universe.update(a.delete)
    facts = tuple(sorted(universe))
    index = {f: i for i, f in enumerate(facts)}
    return GroundTask(facts, tuple(actions), frozenset(index[a] for a in pf.init), pf.goal)


# -- condition compilation ----------------------------------------------------

Clause = tuple[frozenset[Atom], frozenset[Atom]]


def to_dnf(cond: Condition) -> list[Clause]:
    """Disjunctive normal form as (positive atoms, negative atoms) clauses."""
    if isinstance(cond, Atom):
        return [(frozenset([cond]), frozenset())]
    if isinstance(cond, Not):
        return [(frozenset(), frozenset([cond.operand]))]
    if isinstance(cond, Or):
        out: list[Clause] = []
        for part in cond.parts:
            out.extend(to_dnf(part))
            if len(out) > MAX_DNF_CLAUSES:
                raise GroundingExplosion("condition too large to normalize")
        return out
    clauses: list[Clause] = [(frozenset(), frozenset())]
    for part in cond.parts:
        sub = to_dnf(part)
        clauses = [(p1 | p2, n1 | n2) for p1, n1 in clauses for p2, n2 in sub]
        if len(clauses) > MAX_DNF_CLAUSES:
            raise GroundingExplosion("condition too large to normalize")
    return [c for c in clauses if not (c[0] & c[1])]


class _Compiled:
    """Search-ready encoding of a task: static facts folded away, irrelevant actions dropped."""

    def __init__(self, task: GroundTask):
        init_atoms = task.init_atoms()
        dynamic_preds = {a.predicate for act in task.actions for a in act.add | act.delete}

        def is_static(atom: Atom) -> bool:
            return atom.predicate not in dynamic_preds

        def fold(clauses: list[Clause]) -> list[Clause]:
            out = []
            for pos, neg in clauses:
                if any(is_static(a) and a not in init_atoms for a in pos):
                    continue
                if any(is_static(a) and a in init_atoms for a in neg):
                    continue
                out.append((frozenset(a for a in pos if not is_static(a)), frozenset(a for a in neg if not is_static(a))))
            return out

        goal = fold(to_dnf(task.goal))
        acts = []
        for act in task.actions:
            pre = fold(to_dnf(act.precondition))
            if pre:
                acts.append((act, pre))

        # backward relevance over literals
        rel_pos: set[Atom] = set()
        rel_neg: set[Atom] = set()
        for pos, neg in goal:
            rel_pos |= pos
            rel_neg |= neg
        relevant = [False] * len(acts)
        changed = True
        while changed:
            changed = False
            for i, (act, pre) in enumerate(acts):
                if relevant[i]:
                    continue
                if act.add & rel_pos or act.delete & rel_neg:
                    relevant[i] = True
                    changed = True
                    for pos, neg in pre:
                        rel_pos |= pos
                        rel_neg |= neg
        acts = [a for a, keep in zip(acts, relevant) if keep]

        fluents: set[Atom] = set()
        for pos, neg in goal:
            fluents |= pos | neg
        for act, pre in acts:
            fluents |= act.add | act.delete
            for pos, neg in pre:
                fluents |= pos | neg
        self.fluents = sorted(fluents)
        bit = {f: 1 << i for i, f in enumerate(self.fluents)}

        def mask(atoms) -> int:
            m = 0
            for a in atoms:
                m |= bit[a]
            return m

        def masks(clauses: list[Clause]) -> list[tuple[int, int]]:
            return [(mask(p), mask(n)) for p, n in clauses]

        self.goal = masks(goal)
        self.actions = [act for act, _ in acts]
        self.pre = [masks(pre) for _, pre in acts]
        self.add = [mask(a.add & fluents) for a, _ in acts]
        self.dele = [mask(a.delete & fluents) for a, _ in acts]
        self.init = mask(a for a in init_atoms if a in bit)
        self.goal_sizes = [bin(p).count("1") + bin(n).count("1") for p, n in self.goal]

    @staticmethod
    def holds(state: int, clauses: list[tuple[int, int]]) -> bool:
        for pos, neg in clauses:
            if state & pos == pos and not state & neg:
                return True
        return False

    def successors(self, state: int):
        holds = self.holds
        for i, pre in enumerate(self.pre):
            if holds(state, pre):
                yield i, (state & ~self.dele[i]) | self.add[i]

    def goal_distance(self, state: int) -> int:
        best = None
        for (pos, neg), _ in zip(self.goal, self.goal_sizes):
            missing = bin(pos & ~state).count("1") + bin(neg & state).count("1")
            best = missing if best is None else min(best, missing)
        return 0 if best is None else best


def _extract(compiled: _Compiled, parents: dict, state: int) -> Plan:
    steps = []
    while parents[state] is not None:
        prev, idx = parents[state]
        steps.append(compiled.actions[idx])
        state = prev
    return Plan(tuple(reversed(steps)))


def solve(
    task: GroundTask,
    max_expansions: int = DEFAULT_MAX_EXPANSIONS,
    timeout: float | None = None,
    mode: str = "bfs",
) -> Plan:
    """Shortest plan by breadth-first search (``mode="greedy"`` trades optimality for speed).

    Raises `Unsolvable` when the reachable state space holds no goal state and
    `ResourceExhausted` when the expansion or time budget runs out first.
    """
    compiled = _Compiled(task)
    if not compiled.goal:
        raise Unsolvable("goal is statically false")
    start = compiled.init
    if compiled.holds(start, compiled.goal):
        return Plan()
    deadline = None if timeout is None else time.monotonic() + timeout
    parents: dict[int, tuple[int, int] | None] = {start: None}
    expansions = 0

    if mode == "bfs":
        frontier: deque[int] = deque([start])
        pop = frontier.popleft
        push = frontier.append
    elif mode == "greedy":
        heap: list[tuple[int, int, int]] = [(compiled.goal_distance(start), 0, start)]
        counter = itertools.count(1)

        def pop() -> int:
            return heapq.heappop(heap)[2]

        def push(s: int) -> None:
            heapq.heappush(heap, (compiled.goal_distance(s), next(counter), s))

        frontier = heap  # type: ignore[assignment]
    else:
        raise ValueError(f"unknown search mode {mode!r}")

    while frontier:
        if expansions >= max_expansions:
            raise ResourceExhausted(f"expansion limit {max_expansions} reached")
        if deadline is not None and expansions % 512 == 0 and time.monotonic() > deadline:
            raise ResourceExhausted(f"timeout of {timeout}s reached")
        state = pop()
        expansions += 1
        for idx, nxt in compiled.successors(state):
            if nxt in parents:
                continue
            parents[nxt] = (state, idx)
            if compiled.holds(nxt, compiled.goal):
                return _extract(compiled, parents, nxt)
            push(nxt)
    raise Unsolvable(f"no goal state among {len(parents)} reachable states")


# -- validation ---------------------------------------------------------------


def holds(cond: Condition, state: frozenset[Atom] | set[Atom]) -> bool:
    if isinstance(cond, Atom):
        return cond in state
    if isinstance(cond, Not):
        return cond.operand not in state
    if isinstance(cond, And):
        return all(holds(p, state) for p in cond.parts)
    return any(holds(p, state) for p in cond.parts)


def first_failure(cond: Condition, state) -> Condition | None:
    """The innermost sub-condition responsible for `cond` being false, if any."""
    if holds(cond, state):
        return None
    if isinstance(cond, And):
        for p in cond.parts:
            bad = first_failure(p, state)
            if bad is not None:
                return bad
    return cond


def validate_plan(task: GroundTask, plan: Plan | list[GroundAction]) -> PlanCheck:
    state = set(task.init_atoms())
    for i, step in enumerate(plan):
        bad = first_failure(step.precondition, state)
        if bad is not None:
            return PlanCheck(False, i, f"precondition {bad} of {step} does not hold")
        state -= step.delete
        state |= step.add
    bad = first_failure(task.goal, state)
    if bad is not None:
        return PlanCheck(False, len(plan.steps if isinstance(plan, Plan) else plan), f"goal condition {bad} does not hold")
    return PlanCheck(True)


def plan_problem(df: DomainFile, pf: ProblemFile, **limits) -> Plan:
    return solve(ground(df, pf), **limits)
