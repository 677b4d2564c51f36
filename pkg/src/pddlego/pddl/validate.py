from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import Atom, DomainFile, ProblemFile, iter_atoms


class DiagnosticKind(str, Enum):
    UNDECLARED_OBJECT = "UndeclaredObject"
    UNKNOWN_PREDICATE = "UnknownPredicate"
    ARITY_MISMATCH = "ArityMismatch"
    TYPE_MISMATCH = "TypeMismatch"
    NON_GROUND_INIT = "NonGroundInit"


@dataclass(frozen=True)
class Diagnostic:
    kind: DiagnosticKind
    message: str
    atom: Atom | None = None

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.message}"


def _check_atom(atom: Atom, where: str, df: DomainFile, types: dict[str, str]) -> list[Diagnostic]:
    out = []
    decl = df.predicate(atom.predicate)
    if decl is None:
        return [Diagnostic(DiagnosticKind.UNKNOWN_PREDICATE, f"{atom} in {where}: unknown predicate {atom.predicate!r}", atom)]
    if decl.arity != len(atom.args):
        return [
            Diagnostic(
                DiagnosticKind.ARITY_MISMATCH,
                f"{atom} in {where}: {atom.predicate} takes {decl.arity} arguments, got {len(atom.args)}",
                atom,
            )
        ]
    for arg, param in zip(atom.args, decl.parameters):
        if arg.startswith("?"):
            out.append(Diagnostic(DiagnosticKind.NON_GROUND_INIT, f"{atom} in {where}: variable {arg}", atom))
        elif arg not in types:
            out.append(Diagnostic(DiagnosticKind.UNDECLARED_OBJECT, f"{atom} in {where}: object {arg!r} is not declared", atom))
        elif not df.is_subtype(types[arg], param.typ):
            out.append(
                Diagnostic(
                    DiagnosticKind.TYPE_MISMATCH,
                    f"{atom} in {where}: {arg!r} is a {types[arg]}, expected {param.typ}",
                    atom,
                )
            )
    return out


def validate_problem(pf: ProblemFile, df: DomainFile) -> list[Diagnostic]:
    """Return every inconsistency between a problem file and its domain; empty means clean."""
    diags: list[Diagnostic] = []
    types: dict[str, str] = {}
    known_types = df.type_names
    for obj in pf.objects:
        if obj.name in types and types[obj.name] != obj.typ:
            diags.append(
                Diagnostic(DiagnosticKind.TYPE_MISMATCH, f"object {obj.name!r} declared as both {types[obj.name]} and {obj.typ}")
            )
            continue
        if obj.typ not in known_types:
            diags.append(Diagnostic(DiagnosticKind.TYPE_MISMATCH, f"object {obj.name!r} has undeclared type {obj.typ!r}"))
        types[obj.name] = obj.typ
    for atom in sorted(pf.init):
        diags.extend(_check_atom(atom, "init", df, types))
    for atom in iter_atoms(pf.goal):
        diags.extend(_check_atom(atom, "goal", df, types))
    return diags
