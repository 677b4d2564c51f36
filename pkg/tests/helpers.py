"""Shared generators for property tests."""

from __future__ import annotations

import random
from collections import deque
from pathlib import Path

from pddlego.pddl import And, Atom, Not, Or, ProblemFile, TypedName

HERE = Path(__file__).parent
DIRECTIONS = ("north", "south", "east", "west")
ROOM_POOL = ("kitchen", "hallway", "pantry", "loc1", "loc2", "loc3", "garden", "attic", "cellar", "unk_4")

STEP1_TEXT = """\
(define (problem explore)
  (:domain environment)
  (:objects
    kitchen - location
    north south east west - direction
  )
  (:init
    (at kitchen)
    (visited kitchen)
  )
  (:goal (and))
)
"""

TWO_DOOR_DELTA = """\
{
  "objects": {
    "add": [
      "loc1 - location",
      "loc2 - location"
    ],
    "replace": {},
    "delete": []
  },
  "init": {
    "add": [
      "(connected kitchen loc1 south)",
      "(closed_door kitchen loc1)",
      "(connected kitchen loc2 east)",
      "(closed_door kitchen loc2)"
    ],
    "replace": {},
    "delete": []
  }
}
"""


def random_atom(rng: random.Random, rooms: list[str]) -> Atom:
    pick = rng.randrange(4)
    if pick == 0:
        return Atom("at", (rng.choice(rooms),))
    if pick == 1:
        return Atom("visited", (rng.choice(rooms),))
    a, b = rng.sample(rooms, 2) if len(rooms) > 1 else (rooms[0], rooms[0])
    if pick == 2:
        return Atom("connected", (a, b, rng.choice(DIRECTIONS)))
    return Atom("closed_door", (a, b))


def random_condition(rng: random.Random, rooms: list[str], depth: int = 2):
    roll = rng.random()
    if depth == 0 or roll < 0.4:
        atom = random_atom(rng, rooms)
        return Not(atom) if rng.random() < 0.2 else atom
    parts = tuple(random_condition(rng, rooms, depth - 1) for _ in range(rng.randint(1, 3)))
    return And(parts) if roll < 0.7 else Or(parts)


def random_problem(rng: random.Random, name: str = "explore") -> ProblemFile:
    """A well-formed coin-domain problem over a random subset of rooms."""
    rooms = rng.sample(ROOM_POOL, rng.randint(1, 6))
    objects = [TypedName(r, "location") for r in rooms] + [TypedName(d, "direction") for d in DIRECTIONS]
    init = {random_atom(rng, rooms) for _ in range(rng.randint(0, 12))}
    goal = random_condition(rng, rooms) if rng.random() < 0.8 else And(())
    return ProblemFile(name, "environment", tuple(objects), frozenset(init), goal)


def env_shortest_path(env, goal) -> int | None:
    """Breadth-first search over the raw environment, independent of the planner."""
    start = env.clone()
    seen = {start.state_key()}
    queue = deque([(start, 0)])
    while queue:
        node, depth = queue.popleft()
        if goal(node):
            return depth
        for command in node.valid_actions():
            child = node.clone()
            child.step(command)
            key = child.state_key()
            if key not in seen:
                seen.add(key)
                queue.append((child, depth + 1))
    return None


def full_problem(env, goal_room: str | None = None) -> ProblemFile:
    """Problem file with the complete, true map of a coin environment."""
    from pddlego.translator.oracle import pddl_name

    graph = env.graph
    rooms = [pddl_name(r) for r in graph.rooms]
    init = {Atom("at", (pddl_name(env.room),)), Atom("visited", (pddl_name(env.room),))}
    for (src, d), edge in graph.edges.items():
        a, b = pddl_name(src), pddl_name(edge.target)
        init.add(Atom("connected", (a, b, d)))
        if edge.door is not None:
            init.add(Atom("closed_door", (a, b)))
    objects = [TypedName(r, "location") for r in rooms] + [TypedName(d, "direction") for d in DIRECTIONS]
    goal = Atom("at", (pddl_name(goal_room or env.coin_room),))
    return ProblemFile("explore", "environment", tuple(objects), frozenset(init), goal)
