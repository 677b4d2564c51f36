"""Structured add/replace/delete edits over problem files.

The JSON surface is::

    {"objects": {"add": [...], "replace": {...}, "delete": [...]},
     "init":    {"add": [...], "replace": {...}, "delete": [...]}}

Object lines look like ``loc1 - location``; init lines are ground atoms.
Within a section deletes are applied first, then replaces, then adds.
Renaming an object through ``objects.replace`` also renames it inside
every init fact (but never inside the goal).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .pddl import (
    Atom,
    Condition,
    PDDLError,
    ProblemFile,
    TypedName,
    iter_atoms,
    parse_ground_atom,
    parse_object_line,
)

SECTIONS = ("objects", "init")
OPS = ("add", "replace", "delete")


class MalformedDelta(PDDLError):
    """The edit could not be read; the caller should ask the translator again."""


class RenameCollision(PDDLError):
    pass


class UndeclaredObject(PDDLError):
    pass


@dataclass(frozen=True)
class DanglingDelete:
    section: str
    line: str

    def __str__(self) -> str:
        return f"DanglingDelete: {self.section} line {self.line!r} not present"


@dataclass(frozen=True)
class SectionDelta:
    add: tuple[str, ...] = ()
    replace: tuple[tuple[str, str], ...] = ()
    delete: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        clash = set(self.add) & set(self.delete)
        if clash:
            raise MalformedDelta(f"lines both added and deleted: {sorted(clash)}")
        clash = {old for old, _ in self.replace} & set(self.delete)
        if clash:
            raise MalformedDelta(f"lines both replaced and deleted: {sorted(clash)}")

    @property
    def replace_map(self) -> dict[str, str]:
        return dict(self.replace)

    def is_empty(self) -> bool:
        return not (self.add or self.replace or self.delete)

    def to_json(self) -> dict:
        return {"add": list(self.add), "replace": dict(self.replace), "delete": list(self.delete)}


@dataclass(frozen=True)
class Delta:
    objects: SectionDelta = field(default_factory=SectionDelta)
    init: SectionDelta = field(default_factory=SectionDelta)

    def is_empty(self) -> bool:
        return self.objects.is_empty() and self.init.is_empty()

    def to_json(self) -> dict:
        return {"objects": self.objects.to_json(), "init": self.init.to_json()}

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json(), indent=indent)


def canonical_object_line(text: str) -> str:
    return str(parse_object_line(text))


def canonical_fact_line(text: str) -> str:
    return str(parse_ground_atom(text))


def _canon(section: str, text: object) -> str:
    if not isinstance(text, str):
        raise MalformedDelta(f"{section}: expected a string line, got {type(text).__name__}")
    try:
        return canonical_object_line(text) if section == "objects" else canonical_fact_line(text)
    except PDDLError as exc:
        raise MalformedDelta(f"{section}: cannot parse line {text!r}: {exc}") from exc


def _dedupe(lines) -> tuple[str, ...]:
    return tuple(dict.fromkeys(lines))


def make_section(section: str, add=(), replace=None, delete=()) -> SectionDelta:
    """Build a section from raw strings, canonicalizing every line."""
    rep = tuple((_canon(section, k), _canon(section, v)) for k, v in (replace or {}).items())
    return SectionDelta(
        add=_dedupe(_canon(section, x) for x in add),
        replace=rep,
        delete=_dedupe(_canon(section, x) for x in delete),
    )


def parse_delta_json(text: str) -> Delta:
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedDelta(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedDelta("top-level value must be an object")
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise MalformedDelta(f"unknown top-level keys: {sorted(unknown)}")
    parts = {}
    for section in SECTIONS:
        raw = data.get(section, {})
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise MalformedDelta(f"{section} must be an object")
        bad = set(raw) - set(OPS)
        if bad:
            raise MalformedDelta(f"unknown keys in {section}: {sorted(bad)}")
        add = raw.get("add") or []
        delete = raw.get("delete") or []
        replace = raw.get("replace") or {}
        if not isinstance(add, list) or not isinstance(delete, list):
            raise MalformedDelta(f"{section}.add and {section}.delete must be arrays")
        if not isinstance(replace, dict):
            raise MalformedDelta(f"{section}.replace must be an object")
        parts[section] = make_section(section, add, replace, delete)
    return Delta(**parts)


def _rename_atom(atom: Atom, mapping: dict[str, str]) -> Atom:
    return atom.substitute(mapping) if mapping else atom


def apply_delta(pf: ProblemFile, delta: Delta, diagnostics: list | None = None) -> ProblemFile:
    """Return ``pf + delta``. Dangling deletes/replaces are appended to ``diagnostics``."""
    warn = diagnostics.append if diagnostics is not None else (lambda _d: None)

    objects: dict[str, TypedName] = {str(o): o for o in pf.objects}
    for line in delta.objects.delete:
        if objects.pop(line, None) is None:
            warn(DanglingDelete("objects", line))
    renames: dict[str, str] = {}
    for old_line, new_line in delta.objects.replace:
        new = parse_object_line(new_line)
        old = objects.pop(old_line, None)
        if old is None:
            warn(DanglingDelete("objects", old_line))
        elif old.name != new.name:
            if any(o.name == new.name for o in objects.values()):
                raise RenameCollision(f"cannot rename {old.name!r} to {new.name!r}: name already declared")
            renames[old.name] = new.name
        objects[str(new)] = new
    for line in delta.objects.add:
        objects.setdefault(line, parse_object_line(line))

    init = {_rename_atom(a, renames) for a in pf.init}
    for line in delta.init.delete:
        atom = _rename_atom(parse_ground_atom(line), renames)
        if atom in init:
            init.remove(atom)
        else:
            warn(DanglingDelete("init", line))
    for old_line, new_line in delta.init.replace:
        old = _rename_atom(parse_ground_atom(old_line), renames)
        if old in init:
            init.remove(old)
        else:
            warn(DanglingDelete("init", old_line))
        init.add(_rename_atom(parse_ground_atom(new_line), renames))
    for line in delta.init.add:
        init.add(_rename_atom(parse_ground_atom(line), renames))

    return pf.replace(objects=tuple(objects.values()), init=frozenset(init))


def set_goal(pf: ProblemFile, goal: Condition) -> ProblemFile:
    declared = pf.object_names()
    for atom in iter_atoms(goal):
        for arg in atom.args:
            if arg not in declared:
                raise UndeclaredObject(f"goal atom {atom} uses undeclared object {arg!r}")
    if goal == pf.goal:
        return pf
    return pf.replace(goal=goal)


def diff_problems(a: ProblemFile, b: ProblemFile) -> Delta:
    """Smallest add/delete delta turning ``a`` into ``b`` (the goal is ignored)."""
    a_obj = {str(o) for o in a.objects}
    b_obj = {str(o) for o in b.objects}
    a_init = {str(x) for x in a.init}
    b_init = {str(x) for x in b.init}
    return Delta(
        objects=SectionDelta(add=tuple(sorted(b_obj - a_obj)), delete=tuple(sorted(a_obj - b_obj))),
        init=SectionDelta(add=tuple(sorted(b_init - a_init)), delete=tuple(sorted(a_init - b_init))),
    )


def visited_violations(delta: Delta) -> list[str]:
    """Init deletes that drop a ``visited`` fact; such a delta should be rejected."""
    return [line for line in delta.init.delete if parse_ground_atom(line).predicate == "visited"]


def equal_modulo_goal(a: ProblemFile, b: ProblemFile) -> bool:
    return a.objects == b.objects and a.init == b.init
