"""Ordered fallback goals, most preferred first."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..envs.cooking import APPLIANCE_STEP, PAST, Recipe
from ..pddl import And, Atom, Condition, Or, ProblemFile
from ..translator.oracle import pddl_name

KITCHEN = "kitchen"


@dataclass
class Knowledge:
    """What the agent learned outside the problem file."""

    kind: str
    recipe: Recipe | None = None
    coin_room: str | None = None


GoalBuilder = Callable[[ProblemFile, Knowledge], "Condition | None"]


@dataclass(frozen=True)
class SubGoalStack:
    builders: tuple[tuple[str, GoalBuilder], ...] = field(default=())

    def goals(self, pf: ProblemFile, knowledge: Knowledge) -> list[tuple[str, Condition]]:
        out = []
        for name, build in self.builders:
            goal = build(pf, knowledge)
            if goal is not None:
                out.append((name, goal))
        return out


def _any(atoms: list[Atom]) -> Condition | None:
    if not atoms:
        return None
    return atoms[0] if len(atoms) == 1 else Or(tuple(atoms))


def current_room(pf: ProblemFile) -> str | None:
    at = pf.facts("at")
    return at[0].args[0] if at else None


def unvisited(pf: ProblemFile) -> list[str]:
    seen = {a.args[0] for a in pf.facts("visited")}
    return [n for n in pf.objects_of("location") if n not in seen]


def explore(pf: ProblemFile, knowledge: Knowledge) -> Condition | None:
    return _any([Atom("at", (x,)) for x in sorted(unvisited(pf))])


def reach_coin(pf: ProblemFile, knowledge: Knowledge) -> Condition | None:
    if knowledge.coin_room is None:
        return None
    return Atom("at", (knowledge.coin_room,))


def held(pf: ProblemFile) -> set[str]:
    return {a.args[0] for a in pf.facts("have")}


def located(pf: ProblemFile) -> dict[str, str]:
    return {a.args[0]: a.args[1] for a in pf.facts("obj_at")}


def needed_items(recipe: Recipe) -> list[str]:
    items = [pddl_name(i.name) for i in recipe.ingredients]
    if any(i.knife for i in recipe.ingredients):
        items.append("knife")
    return items


def appliances_for(step: str) -> list[str]:
    return [a for a, s in APPLIANCE_STEP.items() if s == step]


def recipe_goal(recipe: Recipe) -> Condition:
    parts = []
    for ing in recipe.ingredients:
        parts.extend(Atom(PAST[s], (pddl_name(ing.name),)) for s in ing.steps)
    parts.append(Atom("at", (KITCHEN,)))
    return And(tuple(parts))


def recipe_complete(pf: ProblemFile, knowledge: Knowledge) -> Condition | None:
    recipe = knowledge.recipe
    if recipe is None:
        return None
    have = held(pf)
    if any(item not in have for item in needed_items(recipe)):
        return None
    where = located(pf)
    for ing in recipe.ingredients:
        if ing.cook and not any(a in where for a in appliances_for(ing.cook)):
            return None
    return recipe_goal(recipe)


def reach_ingredient(pf: ProblemFile, knowledge: Knowledge) -> Condition | None:
    if knowledge.recipe is None:
        return None
    have, where, here = held(pf), located(pf), current_room(pf)
    rooms = {where[i] for i in needed_items(knowledge.recipe) if i not in have and i in where}
    rooms.discard(here)
    return _any([Atom("at", (r,)) for r in sorted(rooms)])


def build_subgoals(kind: str) -> SubGoalStack:
    if kind == "coin":
        return SubGoalStack((("reach-coin", reach_coin), ("explore", explore)))
    if kind == "cooking":
        return SubGoalStack(
            (("recipe-complete", recipe_complete), ("reach-ingredient", reach_ingredient), ("explore", explore))
        )
    raise ValueError(f"unknown environment kind {kind!r}")
