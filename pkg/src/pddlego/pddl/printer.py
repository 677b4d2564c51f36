"""Canonical text form for problem and domain files."""

from __future__ import annotations

from .model import ROOT_TYPE, DomainFile, ProblemFile, TypedName

INDENT = "  "


def _typed(items: tuple[TypedName, ...] | list[TypedName]) -> str:
    return " ".join(f"{t.name} - {t.typ}" for t in items)


def print_problem(pf: ProblemFile) -> str:
    lines = [f"(define (problem {pf.name})"]
    if pf.domain:
        lines.append(f"{INDENT}(:domain {pf.domain})")
    lines.append(f"{INDENT}(:objects")
    lines.extend(f"{INDENT * 2}{o}" for o in pf.objects)
    lines.append(f"{INDENT})")
    lines.append(f"{INDENT}(:init")
    lines.extend(f"{INDENT * 2}{a}" for a in sorted(pf.init))
    lines.append(f"{INDENT})")
    lines.append(f"{INDENT}(:goal {pf.goal})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def print_domain(df: DomainFile) -> str:
    lines = [f"(define (domain {df.name})"]
    if df.requirements:
        lines.append(f"{INDENT}(:requirements {' '.join(sorted(df.requirements))})")
    if df.types:
        lines.append(f"{INDENT}(:types")
        for t in df.types:
            lines.append(f"{INDENT * 2}{t.name}" if t.typ == ROOT_TYPE else f"{INDENT * 2}{t}")
        lines.append(f"{INDENT})")
    lines.append(f"{INDENT}(:predicates")
    for p in df.predicates:
        sig = f" {_typed(p.parameters)}" if p.parameters else ""
        lines.append(f"{INDENT * 2}({p.name}{sig})")
    lines.append(f"{INDENT})")
    for a in df.actions:
        lines.append("")
        lines.append(f"{INDENT}(:action {a.name}")
        lines.append(f"{INDENT * 2}:parameters ({_typed(a.parameters)})")
        lines.append(f"{INDENT * 2}:precondition {a.precondition}")
        if len(a.effects) == 1:
            eff = str(a.effects[0])
        else:
            eff = f"(and {' '.join(str(e) for e in a.effects)})" if a.effects else "(and)"
        lines.append(f"{INDENT * 2}:effect {eff}")
        lines.append(f"{INDENT})")
    lines.append(")")
    return "\n".join(lines) + "\n"
