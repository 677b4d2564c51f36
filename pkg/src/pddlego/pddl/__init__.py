from importlib import resources

from .model import (
    EMPTY_GOAL,
    REQUIREMENTS,
    ROOT_TYPE,
    ActionSchema,
    And,
    Atom,
    Condition,
    DomainFile,
    Effect,
    Not,
    Or,
    PDDLError,
    PDDLSyntaxError,
    PredicateDecl,
    ProblemFile,
    TypedName,
    UnsupportedRequirement,
    iter_atoms,
    substitute,
)
from .parser import (
    parse_condition_text,
    parse_domain,
    parse_ground_atom,
    parse_object_line,
    parse_problem,
)
from .printer import print_domain, print_problem
from .validate import Diagnostic, DiagnosticKind, validate_problem

DOMAIN_FILES = {"coin": "coin-domain.pddl", "cooking": "cooking-domain.pddl"}


def domain_text(kind: str) -> str:
    return resources.files("pddlego.fixtures").joinpath(DOMAIN_FILES[kind]).read_text(encoding="utf-8")


def load_domain(kind: str) -> DomainFile:
    return parse_domain(domain_text(kind))


__all__ = [
    "EMPTY_GOAL",
    "REQUIREMENTS",
    "ROOT_TYPE",
    "ActionSchema",
    "And",
    "Atom",
    "Condition",
    "Diagnostic",
    "DiagnosticKind",
    "DomainFile",
    "Effect",
    "Not",
    "Or",
    "PDDLError",
    "PDDLSyntaxError",
    "PredicateDecl",
    "ProblemFile",
    "TypedName",
    "UnsupportedRequirement",
    "domain_text",
    "iter_atoms",
    "load_domain",
    "parse_condition_text",
    "parse_domain",
    "parse_ground_atom",
    "parse_object_line",
    "parse_problem",
    "print_domain",
    "print_problem",
    "substitute",
    "validate_problem",
]
