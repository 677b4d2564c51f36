"""Immutable AST for the PDDL fragment used by the agent's domain and problem files."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

ROOT_TYPE = "object"

REQUIREMENTS = frozenset(
    {":strips", ":typing", ":negative-preconditions", ":disjunctive-preconditions"}
)


class PDDLError(Exception):
    pass


class PDDLSyntaxError(PDDLError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnsupportedRequirement(PDDLError):
    pass


@dataclass(frozen=True, order=True)
class TypedName:
    name: str
    typ: str = ROOT_TYPE

    def __str__(self) -> str:
        return f"{self.name} - {self.typ}"


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)

    def substitute(self, mapping: dict[str, str]) -> Atom:
        return Atom(self.predicate, tuple(mapping.get(a, a) for a in self.args))


@dataclass(frozen=True)
class Not:
    operand: Atom

    def __str__(self) -> str:
        return f"(not {self.operand})"


@dataclass(frozen=True)
class And:
    parts: tuple[Condition, ...] = ()

    def __str__(self) -> str:
        if not self.parts:
            return "(and)"
        return f"(and {' '.join(str(p) for p in self.parts)})"


@dataclass(frozen=True)
class Or:
    parts: tuple[Condition, ...] = ()

    def __str__(self) -> str:
        if not self.parts:
            return "(or)"
        return f"(or {' '.join(str(p) for p in self.parts)})"


Condition = Union[Atom, Not, And, Or]

EMPTY_GOAL: Condition = And(())


def iter_atoms(cond: Condition) -> Iterator[Atom]:
    """Yield every atom of a condition tree, positive or negated."""
    if isinstance(cond, Atom):
        yield cond
    elif isinstance(cond, Not):
        yield cond.operand
    else:
        for part in cond.parts:
            yield from iter_atoms(part)


def substitute(cond: Condition, mapping: dict[str, str]) -> Condition:
    if isinstance(cond, Atom):
        return cond.substitute(mapping)
    if isinstance(cond, Not):
        return Not(cond.operand.substitute(mapping))
    return type(cond)(tuple(substitute(p, mapping) for p in cond.parts))


@dataclass(frozen=True)
class Effect:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"(not {self.atom})"


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    parameters: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.parameters)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[TypedName, ...] = ()
    precondition: Condition = EMPTY_GOAL
    effects: tuple[Effect, ...] = ()


@dataclass(frozen=True)
class DomainFile:
    name: str
    requirements: frozenset[str] = frozenset()
    types: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def predicate(self, name: str) -> PredicateDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def action(self, name: str) -> ActionSchema | None:
        for a in self.actions:
            if a.name == name:
                return a
        return None

    def supertypes(self, typ: str) -> list[str]:
        """`typ` followed by its ancestors up to the root type."""
        parents = {t.name: t.typ for t in self.types}
        chain = [typ]
        while chain[-1] in parents and parents[chain[-1]] != chain[-1]:
            nxt = parents[chain[-1]]
            if nxt in chain:
                break
            chain.append(nxt)
        if chain[-1] != ROOT_TYPE:
            chain.append(ROOT_TYPE)
        return chain

    def is_subtype(self, typ: str, of: str) -> bool:
        return of in self.supertypes(typ)

    @property
    def type_names(self) -> frozenset[str]:
        return frozenset({ROOT_TYPE} | {t.name for t in self.types})


@dataclass(frozen=True)
class ProblemFile:
    """A problem file. Objects are kept sorted by (type, name); init is a set."""

    name: str
    domain: str
    objects: tuple[TypedName, ...] = ()
    init: frozenset[Atom] = frozenset()
    goal: Condition = field(default=EMPTY_GOAL)

    def __post_init__(self) -> None:
        objs = tuple(sorted(set(self.objects), key=lambda o: (o.typ, o.name)))
        object.__setattr__(self, "objects", objs)
        object.__setattr__(self, "init", frozenset(self.init))

    def object_names(self) -> set[str]:
        return {o.name for o in self.objects}

    def objects_of(self, typ: str) -> list[str]:
        return [o.name for o in self.objects if o.typ == typ]

    def facts(self, predicate: str) -> list[Atom]:
        return sorted(a for a in self.init if a.predicate == predicate)

    def replace(self, **changes) -> ProblemFile:
        data = {
            "name": self.name,
            "domain": self.domain,
            "objects": self.objects,
            "init": self.init,
            "goal": self.goal,
        }
        data.update(changes)
        return ProblemFile(**data)
