"""Template-level reader for the text the built-in games print.

Turns one (command, observation) exchange into a list of events the oracle
can fold into a problem file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .base import UnrecognizedObservation

APPLIANCES = ("stove", "oven", "toaster", "barbeque")
NON_ITEMS = ("cookbook", "coin")
PROCESS_PAST = {"slice": "sliced", "chop": "chopped", "dice": "diced", "grill": "grilled", "roast": "roasted", "fry": "fried"}

_PREFIXES = re.compile(r"^(?:In one part of the room you see|There is also|You also see|In another part of the room you see) ")
_ARTICLE = re.compile(r"^(?:a|an|some) ")
_EXIT = re.compile(
    r"To the (?P<dir>North|South|East|West) you see a closed (?P<door>[^.]+)\."
    r"|To the (?P<dir2>North|South|East|West) you see the (?P<room>[^.]+)\."
    r"|Through an open (?P<door3>[^,]+), to the (?P<dir3>North|South|East|West) you see the (?P<room3>[^.]+)\."
)
_IGNORED = (
    "That is not a valid action.",
    "Gather all following ingredients",
    "Adding the meal to your inventory.",
    "You eat the meal.",
    "You take the coin.",
)


@dataclass(frozen=True)
class Exit:
    direction: str
    door: str | None
    closed: bool
    neighbour: str | None


@dataclass(frozen=True)
class Thing:
    name: str
    kind: str  # appliance, container, surface, item
    items: tuple[str, ...] = ()
    closed: bool = False


@dataclass(frozen=True)
class RoomSeen:
    room: str
    moved: str | None
    exits: tuple[Exit, ...]
    things: tuple[Thing, ...] = field(default=())


@dataclass(frozen=True)
class DoorOpened:
    direction: str
    room: str


@dataclass(frozen=True)
class ContainerOpened:
    container: str
    items: tuple[str, ...]


@dataclass(frozen=True)
class Taken:
    item: str


@dataclass(frozen=True)
class Processed:
    item: str
    predicate: str


def strip_article(text: str) -> str:
    return _ARTICLE.sub("", text.strip(), count=1)


def split_items(text: str) -> tuple[str, ...]:
    out = []
    for part in text.split(", "):
        part = part.strip()
        if part.startswith("and "):
            part = part[4:]
        if part:
            out.append(strip_article(part))
    return tuple(out)


def parse_thing(phrase: str) -> Thing:
    m = re.fullmatch(r"(.+?), that has nothing on it", phrase)
    if m:
        return Thing(strip_article(m.group(1)), "surface")
    m = re.fullmatch(r"(.+?) that has (.+) on it", phrase)
    if m:
        return Thing(strip_article(m.group(1)), "surface", split_items(m.group(2)))
    m = re.fullmatch(r"(.+?) that is closed", phrase)
    if m:
        return Thing(strip_article(m.group(1)), "container", closed=True)
    m = re.fullmatch(r"(.+?) that is open and empty", phrase)
    if m:
        return Thing(strip_article(m.group(1)), "container")
    m = re.fullmatch(r"(.+?) that is open and contains (.+)", phrase)
    if m:
        return Thing(strip_article(m.group(1)), "container", split_items(m.group(2)))
    name = strip_article(phrase)
    return Thing(name, "appliance" if name in APPLIANCES else "item")


def parse_room(text: str, moved: str | None) -> RoomSeen:
    first, _, rest = text.partition("\n")
    # Exit clauses may also trail the room sentence on the same line.
    inline = re.search(r"(?:To the (?:North|South|East|West) |Through an open )", first)
    if inline:
        first, rest = first[: inline.start()].rstrip(), first[inline.start() :] + " " + rest
    m = re.match(r"You are in the ([^.]+)\.\s*(.*)$", first)
    if not m:
        raise UnrecognizedObservation(f"not a room description: {first!r}")
    room, body = m.group(1), m.group(2).strip()
    things = []
    if body:
        for sentence in body.rstrip(".").split(". "):
            phrase = _PREFIXES.sub("", sentence.strip(), count=1)
            if phrase == sentence.strip():
                raise UnrecognizedObservation(f"unknown sentence {sentence!r}")
            things.append(parse_thing(phrase))
    exits = []
    consumed = 0
    exits_text = rest.strip()
    for em in _EXIT.finditer(exits_text):
        consumed += len(em.group(0))
        if em.group("dir"):
            exits.append(Exit(em.group("dir").lower(), em.group("door"), True, None))
        elif em.group("dir2"):
            exits.append(Exit(em.group("dir2").lower(), None, False, em.group("room")))
        else:
            exits.append(Exit(em.group("dir3").lower(), em.group("door3"), False, em.group("room3")))
    if len(exits_text.replace(" ", "")) != sum(len(e.group(0).replace(" ", "")) for e in _EXIT.finditer(exits_text)):
        raise UnrecognizedObservation(f"unparsed exit text in {exits_text!r}")
    return RoomSeen(room, moved, tuple(exits), tuple(things))


def parse_exchange(command: str | None, text: str) -> list:
    """Events carried by one observation; raises `UnrecognizedObservation` on template drift."""
    command = (command or "").strip().lower()
    text = text.strip()
    if text.startswith("You are in the"):
        moved = command[5:] if command.startswith("move ") else None
        return [parse_room(text, moved)]
    if any(text.startswith(p) for p in _IGNORED):
        return []
    m = re.match(r"You open the ([^,]+), revealing the ([^.]+)\.$", text)
    if m and command.startswith("open door to "):
        return [DoorOpened(command[13:], m.group(2))]
    m = re.match(r"You open the ([^.]+)\. (?:It's empty inside\.|The \1 contains (.+)\.)$", text)
    if m:
        return [ContainerOpened(m.group(1), split_items(m.group(2)) if m.group(2) else ())]
    m = re.match(r"You take the ([^.]+)\.$", text)
    if m:
        return [Taken(m.group(1))]
    m = re.match(r"You (slice|chop|dice) the ([^.]+)\.( That was not what the recipe asked for\. You lost!)?$", text)
    if m:
        return [] if m.group(3) else [Processed(m.group(2), PROCESS_PAST[m.group(1)])]
    m = re.match(
        r"You (grill|roast|fry) the (.+?) with the ([^.]+)\.( That was not what the recipe asked for\. You lost!)?$", text
    )
    if m:
        return [] if m.group(4) else [Processed(m.group(2), PROCESS_PAST[m.group(1)])]
    raise UnrecognizedObservation(f"unrecognized observation {text[:80]!r}")
