"""Deterministic ground-truth translator.

Reads observations produced by `pddlego.envs` and maintains a problem file the
way a perfect annotator would: closed doors hide placeholder rooms, entering
a room names it, and every room sits on a grid so two names that land on the
same cell are the same room.
"""

from __future__ import annotations

import re
from collections import Counter

from ..edit import Delta, SectionDelta, apply_delta, equal_modulo_goal
from ..envs.base import DIRECTIONS, OFFSETS
from ..pddl import (
    EMPTY_GOAL,
    Atom,
    DomainFile,
    ProblemFile,
    TypedName,
    load_domain,
    parse_problem,
    print_problem,
)
from .base import Mode, TranslatorError, TranslatorRequest, TranslatorResponse, split_transcript
from .observations import (
    NON_ITEMS,
    ContainerOpened,
    DoorOpened,
    Processed,
    RoomSeen,
    Taken,
    parse_exchange,
)

PROBLEM_NAME = "explore"
TERMINAL_ACTIONS = ("take coin", "eat meal")


def pddl_name(text: str) -> str:
    name = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    if not name or not name[0].isalpha():
        name = f"n_{name}"
    return name


def _item_type(name: str) -> str:
    return "knife" if name == "knife" else "ingredient"


class _World:
    """Mutable working copy of a problem file, keyed for quick edits."""

    def __init__(self, prior: ProblemFile | None, domain: DomainFile, prefix: str):
        self.domain = domain
        self.prefix = prefix
        self.types = domain.type_names
        self.predicates = {p.name for p in domain.predicates}
        self.objects: dict[str, str] = {}
        self.init: dict[Atom, None] = {}
        self.alias: dict[str, str] = {}
        if prior is not None:
            self.objects = {o.name: o.typ for o in prior.objects}
            self.init = dict.fromkeys(sorted(prior.init))
        for d in DIRECTIONS:
            self.objects.setdefault(d, "direction")
        self._placeholder = re.compile(re.escape(prefix) + r"(\d+)\Z")

    # -- primitives -------------------------------------------------------

    def is_placeholder(self, name: str) -> bool:
        return bool(self._placeholder.match(name))

    def fresh(self) -> str:
        used = [int(m.group(1)) for n in self.objects if (m := self._placeholder.match(n))]
        name = f"{self.prefix}{max(used, default=0) + 1}"
        self.objects[name] = "location"
        return name

    def declare(self, name: str, typ: str) -> bool:
        if typ not in self.types:
            return False
        self.objects.setdefault(name, typ)
        return True

    def add(self, predicate: str, *args: str) -> None:
        if predicate in self.predicates:
            self.init.setdefault(Atom(predicate, args), None)

    def remove(self, predicate: str, *args: str) -> None:
        self.init.pop(Atom(predicate, args), None)

    def drop_where(self, predicate: str, **pos: str) -> None:
        for atom in [a for a in self.init if a.predicate == predicate]:
            if all(atom.args[int(k[1:])] == v for k, v in pos.items()):
                del self.init[atom]

    def where(self, predicate: str) -> list[Atom]:
        return [a for a in self.init if a.predicate == predicate]

    def current(self) -> str | None:
        at = self.where("at")
        return at[0].args[0] if at else None

    def neighbour(self, room: str, direction: str) -> str | None:
        for a in self.where("connected"):
            if a.args[0] == room and a.args[2] == direction:
                return a.args[1]
        return None

    def merge(self, old: str, new: str) -> None:
        """Fold ``old`` into ``new``; a rename when ``new`` is not yet declared."""
        if old == new:
            return
        typ = self.objects.pop(old)
        self.objects.setdefault(new, typ)
        self.init = {a.substitute({old: new}): None for a in self.init}
        self.alias[old] = new
        for k, v in self.alias.items():
            if v == old:
                self.alias[k] = new

    # -- events -----------------------------------------------------------

    def on_room(self, ev: RoomSeen) -> None:
        room = pddl_name(ev.room)
        cur = self.current()
        if ev.moved and cur:
            target = self.neighbour(cur, ev.moved)
            if target and target != room:
                self.merge(target, room)
        self.declare(room, "location")
        self.drop_where("at")
        self.add("at", room)
        self.add("visited", room)
        for ex in ev.exits:
            known = self.neighbour(room, ex.direction)
            if ex.neighbour is not None:
                other = pddl_name(ex.neighbour)
                if known and known != other:
                    self.merge(known, other)
                self.declare(other, "location")
                self.add("connected", room, other, ex.direction)
                self.remove("closed_door", room, other)
                self.remove("closed_door", other, room)
            else:
                if known is None:
                    known = self.fresh()
                    self.add("connected", room, known, ex.direction)
                self.add("closed_door", room, known)
        for thing in ev.things:
            name = pddl_name(thing.name)
            if thing.kind in ("appliance", "container"):
                typ = name if thing.kind == "appliance" else "container"
                if self.declare(name, typ):
                    self.add("obj_at", name, room)
            elif thing.kind == "item":
                self.on_item(thing.name, room)
            for item in thing.items:
                self.on_item(item, room)

    def on_item(self, item: str, room: str) -> None:
        if item in NON_ITEMS:
            return
        name = pddl_name(item)
        if Atom("have", (name,)) in self.init:
            return
        if self.declare(name, _item_type(item)):
            self.drop_where("obj_at", a0=name)
            self.add("obj_at", name, room)

    def on_door(self, ev: DoorOpened) -> None:
        cur = self.current()
        if cur is None:
            raise TranslatorError("door opened before any room was observed")
        room = pddl_name(ev.room)
        known = self.neighbour(cur, ev.direction)
        if known and known != room:
            self.merge(known, room)
        self.declare(room, "location")
        self.add("connected", cur, room, ev.direction)
        self.remove("closed_door", cur, room)
        self.remove("closed_door", room, cur)

    def on_event(self, ev) -> None:
        if isinstance(ev, RoomSeen):
            self.on_room(ev)
        elif isinstance(ev, DoorOpened):
            self.on_door(ev)
        elif isinstance(ev, ContainerOpened):
            cur = self.current()
            for item in ev.items:
                self.on_item(item, cur)
        elif isinstance(ev, Taken):
            if ev.item in NON_ITEMS:
                return
            name = pddl_name(ev.item)
            if self.declare(name, _item_type(ev.item)):
                self.drop_where("obj_at", a0=name)
                self.add("have", name)
        elif isinstance(ev, Processed):
            self.add(ev.predicate, pddl_name(ev.item))

    # -- grid consistency -------------------------------------------------

    def positions(self) -> dict[str, tuple[int, int]]:
        edges: dict[str, list[tuple[str, tuple[int, int]]]] = {}
        for a in self.where("connected"):
            src, dst, d = a.args
            dx, dy = OFFSETS[d]
            edges.setdefault(src, []).append((dst, (dx, dy)))
            edges.setdefault(dst, []).append((src, (-dx, -dy)))
        start = self.current()
        if start is None:
            return {}
        pos = {start: (0, 0)}
        queue = [start]
        while queue:
            node = queue.pop(0)
            x, y = pos[node]
            for other, (dx, dy) in edges.get(node, []):
                if other not in pos:
                    pos[other] = (x + dx, y + dy)
                    queue.append(other)
        return pos

    def unify_cells(self) -> None:
        while True:
            cells: dict[tuple[int, int], list[str]] = {}
            for name, p in sorted(self.positions().items()):
                cells.setdefault(p, []).append(name)
            clash = next((names for names in cells.values() if len(names) > 1), None)
            if clash is None:
                return
            named = [n for n in clash if not self.is_placeholder(n)]
            if len(named) > 1:
                raise TranslatorError(f"rooms {named} occupy the same cell")
            keep = named[0] if named else min(clash, key=lambda n: int(self._placeholder.match(n).group(1)))
            for n in clash:
                if n != keep:
                    self.merge(n, keep)

    def resolve(self, name: str) -> str:
        while name in self.alias:
            name = self.alias[name]
        return name

    def problem(self, template: ProblemFile | None) -> ProblemFile:
        return ProblemFile(
            name=template.name if template else PROBLEM_NAME,
            domain=template.domain if template else self.domain.name,
            objects=tuple(TypedName(n, t) for n, t in self.objects.items()),
            init=frozenset(self.init),
            goal=template.goal if template else EMPTY_GOAL,
        )


def compose_delta(prior: ProblemFile, world: _World) -> Delta:
    """Express ``world`` as an edit of ``prior``: renames first, then set differences."""
    prior_names = prior.object_names()
    prior_types = {o.name: o.typ for o in prior.objects}
    replace = []
    for old in sorted(prior_names - set(world.objects)):
        new = world.resolve(old)
        if new != old and new not in prior_names and new in world.objects:
            if not any(r[1] == f"{new} - {prior_types[old]}" for r in replace):
                replace.append((f"{old} - {prior_types[old]}", f"{new} - {prior_types[old]}"))
    renamed = apply_delta(prior, Delta(objects=SectionDelta(replace=tuple(replace))))
    before_obj = {str(o) for o in renamed.objects}
    after_obj = [f"{n} - {t}" for n, t in world.objects.items()]
    before_init = set(renamed.init)
    after_init = list(world.init)
    return Delta(
        objects=SectionDelta(
            add=tuple(x for x in after_obj if x not in before_obj),
            replace=tuple(replace),
            delete=tuple(sorted(before_obj - set(after_obj))),
        ),
        init=SectionDelta(
            add=tuple(str(a) for a in after_init if a not in before_init),
            delete=tuple(str(a) for a in sorted(before_init - set(after_init))),
        ),
    )


class OracleTranslator:
    """Perfect observation reader; pure given the request."""

    name = "oracle"

    def __init__(self, prefix: str = "unk_", domains: dict[str, DomainFile] | None = None):
        self.prefix = prefix
        self._domains = dict(domains or {})

    def domain(self, kind: str) -> DomainFile:
        if kind not in self._domains:
            self._domains[kind] = load_domain(kind)
        return self._domains[kind]

    def world(self, request: TranslatorRequest) -> tuple[ProblemFile | None, _World]:
        prior = parse_problem(request.problem) if request.problem else None
        world = _World(prior, self.domain(request.domain), self.prefix)
        for command, text in split_transcript(request.observation):
            for ev in parse_exchange(command, text):
                world.on_event(ev)
            world.unify_cells()
        return prior, world

    def translate(self, request: TranslatorRequest) -> TranslatorResponse:
        if request.mode == Mode.ACTION:
            text = choose_action(request)
            return TranslatorResponse(request.mode, text, text)
        prior, world = self.world(request)
        new = world.problem(prior)
        if request.mode == Mode.INIT:
            text = print_problem(new)
            return TranslatorResponse(request.mode, text, text)
        delta = compose_delta(prior, world)
        if not equal_modulo_goal(apply_delta(prior, delta), new):
            raise TranslatorError("composed delta does not reproduce the observed state")
        text = delta.dumps()
        return TranslatorResponse(request.mode, text, text)

    def problem_after(self, request: TranslatorRequest) -> ProblemFile:
        prior, world = self.world(request)
        return world.problem(prior)


def choose_action(request: TranslatorRequest) -> str:
    """Terminal moves first, then the least-tried valid command (ties by list order)."""
    for act in TERMINAL_ACTIONS:
        if act in request.valid_actions:
            return act
    tried = Counter(
        line[2:].strip() for entry in request.history for line in entry.splitlines() if line.startswith("< ")
    )
    return min(request.valid_actions, key=lambda a: (tried[a], request.valid_actions.index(a)))
