"""Rendering planner actions as game commands."""

from __future__ import annotations

from ..pddl import PDDLError, ProblemFile
from ..planner import GroundAction, Plan

KNIFE_ACTIONS = ("chop", "slice", "dice")
COOK_ACTIONS = ("use_stove", "use_oven", "use_toaster", "use_barbeque")


class MissingDirection(PDDLError):
    """No ``connected`` fact links the two locations of a move or door action."""


def surface(name: str) -> str:
    return name.replace("_", " ")


def direction_between(pf: ProblemFile, src: str, dst: str) -> str | None:
    for atom in pf.facts("connected"):
        if atom.args[0] == src and atom.args[1] == dst:
            return atom.args[2]
    return None


def ground_action_to_command(action: GroundAction, pf: ProblemFile) -> str:
    name, args = action.name, action.args
    if name == "move":
        src, dst, d = args
        if direction_between(pf, src, dst) != d:
            raise MissingDirection(f"no (connected {src} {dst} {d}) fact")
        return f"move {d}"
    if name == "open_door":
        src, dst = args
        d = direction_between(pf, src, dst)
        if d is None:
            raise MissingDirection(f"no connected fact from {src} to {dst}")
        return f"open door to {d}"
    if name in KNIFE_ACTIONS:
        return f"{name} {surface(args[0])}"
    if name in COOK_ACTIONS:
        ingredient, _, appliance = args
        return f"cook {surface(ingredient)} in {surface(appliance)}"
    raise ValueError(f"no command template for action {name!r}")


def order_plan(plan: Plan, recipe=None) -> Plan:
    """Hoist each ingredient's knife step in front of its first cook step.

    Everything else keeps its relative order. ``recipe`` is accepted for
    symmetry with callers but the plan itself says which steps exist.
    """
    steps = list(plan.steps)
    out: list[GroundAction] = []
    hoisted: set[int] = set()
    for i, step in enumerate(steps):
        if i in hoisted:
            continue
        if step.name in COOK_ACTIONS:
            ing = step.args[0]
            for j in range(i + 1, len(steps)):
                if j not in hoisted and steps[j].name in KNIFE_ACTIONS and steps[j].args[0] == ing:
                    out.append(steps[j])
                    hoisted.add(j)
        out.append(step)
    return Plan(tuple(out))
