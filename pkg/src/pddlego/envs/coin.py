from __future__ import annotations

import random

from .base import DIRECTIONS, RoomGraph, TextEnv, generate_layout

ROOM_NAMES = (
    "kitchen",
    "pantry",
    "corridor",
    "bedroom",
    "bathroom",
    "living room",
    "backyard",
    "driveway",
    "street",
    "supermarket",
    "laundry room",
    "garden",
)

COIN_STEP_CAP = 50


def room_names(rng: random.Random, count: int) -> list[str]:
    pool = list(ROOM_NAMES)
    rng.shuffle(pool)
    names = pool[:count]
    names.extend(f"room {i}" for i in range(len(names) + 1, count + 1))
    return names


class CoinEnv(TextEnv):
    """Find the coin somewhere in a house of closed and open doors."""

    kind = "coin"

    def __init__(self, graph: RoomGraph, start: str, coin_room: str, step_cap: int = COIN_STEP_CAP):
        super().__init__(graph, start, step_cap)
        self.coin_room = coin_room
        self.has_coin = False

    def describe_contents(self, room: str) -> str:
        if room == self.coin_room and not self.has_coin:
            return "In one part of the room you see a coin."
        return ""

    def valid_actions(self) -> list[str]:
        if self.terminal != "ongoing":
            return []
        # Both verbs are always offered in all four directions, accepted or not.
        acts = [f"move {d}" for d in DIRECTIONS] + [f"open door to {d}" for d in DIRECTIONS]
        if self.room == self.coin_room and not self.has_coin:
            acts.append("take coin")
        return acts

    def _dispatch(self, command: str) -> str | None:
        verb, _, rest = command.partition(" ")
        if verb == "move" and rest in DIRECTIONS:
            return self._move(rest)
        if command.startswith("open door to ") and command[13:] in DIRECTIONS:
            return self._open_door(command[13:])
        if command == "take coin" and self.room == self.coin_room and not self.has_coin:
            self.has_coin = True
            self.terminal = "success"
            return "You take the coin."
        return None

    def state_key(self) -> tuple:
        return super().state_key() + (self.has_coin,)

    def snapshot(self) -> dict:
        snap = super().snapshot()
        snap.update({"coin_room": self.coin_room, "has_coin": self.has_coin})
        return snap


def gen_coin_env(
    seed: int,
    rooms: int = 11,
    step_cap: int = COIN_STEP_CAP,
    door_rate: float = 0.4,
    extra_edge_rate: float = 0.3,
) -> CoinEnv:
    if rooms < 1:
        raise ValueError("need at least one room")
    rng = random.Random(f"coin:{seed}:{rooms}")
    names = room_names(rng, rooms)
    graph = generate_layout(rng, names, extra_edge_rate=extra_edge_rate, door_rate=door_rate)
    start = names[0]
    coin_room = start if rooms == 1 else rng.choice(names[1:])
    return CoinEnv(graph, start, coin_room, step_cap)
