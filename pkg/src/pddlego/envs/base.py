"""Room graphs, observations and the navigation mechanics shared by both games."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

DIRECTIONS = ("north", "south", "east", "west")
REVERSE = {"north": "south", "south": "north", "east": "west", "west": "east"}
OFFSETS = {"north": (0, 1), "south": (0, -1), "east": (1, 0), "west": (-1, 0)}

DOOR_NAMES = (
    "wooden door",
    "plain door",
    "glass door",
    "wood door",
    "sliding patio door",
    "screen door",
    "frosted-glass door",
    "fiberglass door",
    "barn door",
    "sliding door",
)

INVALID_TEXT = "That is not a valid action."


class StepStatus(str, Enum):
    OK = "ok"
    INVALID = "invalid"


@dataclass(frozen=True)
class Observation:
    text: str
    valid_actions: tuple[str, ...]
    terminal: str = "ongoing"  # ongoing | success | failure
    reason: str = ""

    @property
    def done(self) -> bool:
        return self.terminal != "ongoing"


@dataclass(frozen=True)
class Edge:
    target: str
    door: str | None = None  # door name, or None for an open passage


@dataclass(frozen=True)
class RoomGraph:
    rooms: tuple[str, ...]
    edges: dict[tuple[str, str], Edge]
    positions: dict[str, tuple[int, int]] = field(default_factory=dict)

    def exits(self, room: str) -> list[tuple[str, Edge]]:
        return [(d, self.edges[(room, d)]) for d in DIRECTIONS if (room, d) in self.edges]

    def neighbours(self, room: str) -> list[str]:
        return [e.target for _, e in self.exits(room)]

    def direction(self, src: str, dst: str) -> str | None:
        for d, e in self.exits(src):
            if e.target == dst:
                return d
        return None

    def doors(self) -> list[frozenset[str]]:
        return sorted(
            {frozenset((a, e.target)) for (a, _), e in self.edges.items() if e.door},
            key=lambda p: sorted(p),
        )

    def to_json(self) -> dict:
        return {
            "rooms": list(self.rooms),
            "edges": [
                {"room": r, "direction": d, "target": e.target, "door": e.door}
                for (r, d), e in sorted(self.edges.items())
            ],
            "positions": {r: list(p) for r, p in sorted(self.positions.items())},
        }


def door_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def generate_layout(
    rng: random.Random,
    names: list[str],
    extra_edge_rate: float = 0.3,
    door_rate: float = 0.4,
) -> RoomGraph:
    """Grow a random spanning tree on a grid, then add edges between some grid neighbours.

    Laying rooms on a grid keeps directions geometrically consistent: each
    (room, direction) has at most one edge and every edge has a reverse.
    """
    positions = {names[0]: (0, 0)}
    occupied = {(0, 0): names[0]}
    pairs: list[tuple[str, str, str]] = []
    for name in names[1:]:
        while True:
            anchor = rng.choice(list(positions))
            d = rng.choice(DIRECTIONS)
            x, y = positions[anchor]
            dx, dy = OFFSETS[d]
            cell = (x + dx, y + dy)
            if cell not in occupied:
                break
        positions[name] = cell
        occupied[cell] = name
        pairs.append((anchor, d, name))
    linked = {frozenset((a, b)) for a, _, b in pairs}
    for name in names:
        x, y = positions[name]
        for d in ("north", "east"):
            dx, dy = OFFSETS[d]
            other = occupied.get((x + dx, y + dy))
            if other is None or frozenset((name, other)) in linked:
                continue
            if rng.random() < extra_edge_rate:
                pairs.append((name, d, other))
                linked.add(frozenset((name, other)))
    edges: dict[tuple[str, str], Edge] = {}
    for a, d, b in pairs:
        door = rng.choice(DOOR_NAMES) if rng.random() < door_rate else None
        edges[(a, d)] = Edge(b, door)
        edges[(b, REVERSE[d])] = Edge(a, door)
    return RoomGraph(tuple(names), edges, positions)


def join_items(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + ", and " + items[-1]


class TextEnv:
    """Single-owner mutable game session with a step budget."""

    kind = "base"

    def __init__(self, graph: RoomGraph, start: str, step_cap: int):
        self.graph = graph
        self.room = start
        self.step_cap = step_cap
        self.steps_taken = 0
        self.invalid_steps = 0
        self.open_doors: set[tuple[str, str]] = set()
        self.terminal = "ongoing"
        self.reason = ""

    # -- rendering --------------------------------------------------------

    def exits_text(self, room: str) -> str:
        parts = []
        for d, e in self.graph.exits(room):
            label = d.capitalize()
            if e.door is None:
                parts.append(f"To the {label} you see the {e.target}.")
            elif door_key(room, e.target) in self.open_doors:
                parts.append(f"Through an open {e.door}, to the {label} you see the {e.target}.")
            else:
                parts.append(f"To the {label} you see a closed {e.door}.")
        return " ".join(parts)

    def describe_contents(self, room: str) -> str:
        return ""

    def describe(self) -> str:
        head = f"You are in the {self.room}."
        body = self.describe_contents(self.room)
        if body:
            head = f"{head} {body}"
        return f"{head}\n{self.exits_text(self.room)}"

    def valid_actions(self) -> list[str]:
        raise NotImplementedError

    def observe(self) -> Observation:
        return Observation(self.describe(), tuple(self.valid_actions()), self.terminal, self.reason)

    # -- dynamics ---------------------------------------------------------

    def is_closed(self, room: str, direction: str) -> bool:
        e = self.graph.edges[(room, direction)]
        return e.door is not None and door_key(room, e.target) not in self.open_doors

    def _move(self, direction: str) -> str | None:
        e = self.graph.edges.get((self.room, direction))
        if e is None:
            return None
        if self.is_closed(self.room, direction):
            return None
        self.room = e.target
        return self.describe()

    def _open_door(self, direction: str) -> str | None:
        e = self.graph.edges.get((self.room, direction))
        if e is None or e.door is None or not self.is_closed(self.room, direction):
            return None
        self.open_doors.add(door_key(self.room, e.target))
        return f"You open the {e.door}, revealing the {e.target}."

    def _dispatch(self, command: str) -> str | None:
        """Apply `command`; return the response text, or None when it is invalid."""
        raise NotImplementedError

    def step(self, command: str) -> tuple[Observation, StepStatus]:
        if self.terminal != "ongoing":
            raise RuntimeError(f"episode already finished ({self.terminal})")
        command = " ".join(command.strip().lower().split())
        self.steps_taken += 1
        text = self._dispatch(command)
        status = StepStatus.OK
        if text is None:
            status = StepStatus.INVALID
            self.invalid_steps += 1
            text = INVALID_TEXT
        if self.terminal == "ongoing" and self.steps_taken >= self.step_cap:
            self.terminal = "failure"
            self.reason = "step cap reached"
        return Observation(text, tuple(self.valid_actions()), self.terminal, self.reason), status

    # -- introspection ----------------------------------------------------

    def clone(self) -> TextEnv:
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.open_doors = set(self.open_doors)
        self._clone_extra(other)
        return other

    def _clone_extra(self, other: TextEnv) -> None:
        pass

    def state_key(self) -> tuple:
        return (self.room, tuple(sorted(self.open_doors)), self.terminal)

    def snapshot(self) -> dict:
        return {
            "kind": self.kind,
            "graph": self.graph.to_json(),
            "room": self.room,
            "open_doors": [list(d) for d in sorted(self.open_doors)],
            "steps_taken": self.steps_taken,
            "step_cap": self.step_cap,
            "terminal": self.terminal,
            "reason": self.reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), indent=2, sort_keys=True)


def transcript(env: TextEnv, commands: list[str]) -> str:
    """Play `commands` from the env's current state and render a ``< cmd`` / ``> obs`` log."""
    lines = [f"> {env.observe().text}"]
    for cmd in commands:
        if env.terminal != "ongoing":
            break
        obs, _ = env.step(cmd)
        lines.append(f"< {cmd}")
        lines.append(f"> {obs.text}")
    return "\n".join(lines) + "\n"
