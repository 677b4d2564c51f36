"""Recursive-descent reader for domain and problem files."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .model import (
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
    PDDLSyntaxError,
    PredicateDecl,
    ProblemFile,
    TypedName,
    UnsupportedRequirement,
    iter_atoms,
)

IDENT = re.compile(r"[a-z][a-z0-9_-]*\Z")
_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_KEYWORDS = {"and", "or", "not", "define", "-"}


@dataclass
class Token:
    text: str
    line: int
    column: int


@dataclass
class SList:
    items: list[Node]
    line: int
    column: int


Node = Union[Token, SList]


def _where(node: Node) -> tuple[int, int]:
    return node.line, node.column


def tokenize(text: str) -> list[Token]:
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0]
        for m in _TOKEN.finditer(line):
            tokens.append(Token(m.group(0).lower(), lineno, m.start() + 1))
    return tokens


def read_sexpr(text: str) -> SList:
    tokens = tokenize(text)
    if not tokens:
        raise PDDLSyntaxError("empty input", 1, 1)
    stack: list[SList] = []
    root: SList | None = None
    for tok in tokens:
        if root is not None:
            raise PDDLSyntaxError(f"unexpected {tok.text!r} after end of definition", tok.line, tok.column)
        if tok.text == "(":
            stack.append(SList([], tok.line, tok.column))
        elif tok.text == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", tok.line, tok.column)
            done = stack.pop()
            if stack:
                stack[-1].items.append(done)
            else:
                root = done
        else:
            if not stack:
                raise PDDLSyntaxError(f"expected '(' but found {tok.text!r}", tok.line, tok.column)
            stack[-1].items.append(tok)
    if stack:
        line, col = _where(stack[-1])
        raise PDDLSyntaxError("missing ')'", line, col)
    assert root is not None
    return root


def _word(node: Node, what: str) -> str:
    if not isinstance(node, Token):
        raise PDDLSyntaxError(f"expected {what}, found a list", *_where(node))
    return node.text


def _ident(node: Node, what: str) -> str:
    text = _word(node, what)
    if not IDENT.match(text) or text in _KEYWORDS:
        raise PDDLSyntaxError(f"invalid {what} {text!r}", *_where(node))
    return text


def _list(node: Node, what: str) -> SList:
    if not isinstance(node, SList):
        raise PDDLSyntaxError(f"expected {what}, found {node.text!r}", *_where(node))
    return node


def _typed_list(items: list[Node], variables: bool) -> list[TypedName]:
    out: list[TypedName] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        node = items[i]
        text = _word(node, "name")
        if text == "-":
            if not pending or i + 1 >= len(items):
                raise PDDLSyntaxError("dangling '-' in typed list", *_where(node))
            typ = _ident(items[i + 1], "type")
            out.extend(TypedName(n, typ) for n in pending)
            pending = []
            i += 2
            continue
        if variables:
            if not text.startswith("?") or not IDENT.match(text[1:]):
                raise PDDLSyntaxError(f"invalid variable {text!r}", *_where(node))
            pending.append(text)
        else:
            pending.append(_ident(node, "name"))
        i += 1
    out.extend(TypedName(n, ROOT_TYPE) for n in pending)
    return out


def _term(node: Node) -> str:
    text = _word(node, "term")
    if text.startswith("?"):
        if not IDENT.match(text[1:]):
            raise PDDLSyntaxError(f"invalid variable {text!r}", *_where(node))
        return text
    return _ident(node, "constant")


def parse_atom(node: Node) -> Atom:
    lst = _list(node, "atom")
    if not lst.items:
        raise PDDLSyntaxError("empty atom", *_where(lst))
    pred = _ident(lst.items[0], "predicate")
    return Atom(pred, tuple(_term(n) for n in lst.items[1:]))


def parse_condition(node: Node) -> Condition:
    lst = _list(node, "condition")
    if not lst.items:
        return And(())
    head = _word(lst.items[0], "connective or predicate")
    if head == "and":
        return And(tuple(parse_condition(n) for n in lst.items[1:]))
    if head == "or":
        return Or(tuple(parse_condition(n) for n in lst.items[1:]))
    if head == "not":
        if len(lst.items) != 2:
            raise PDDLSyntaxError("'not' takes exactly one argument", *_where(lst))
        inner = _list(lst.items[1], "atom")
        if inner.items and isinstance(inner.items[0], Token) and inner.items[0].text in ("and", "or", "not"):
            raise PDDLSyntaxError("'not' may only wrap an atom", *_where(inner))
        return Not(parse_atom(inner))
    if head in ("exists", "forall", "imply", "when"):
        raise PDDLSyntaxError(f"unsupported construct {head!r}", *_where(lst))
    return parse_atom(lst)


def _parse_literal(node: Node) -> Effect:
    lst = _list(node, "effect literal")
    if lst.items and isinstance(lst.items[0], Token):
        head = lst.items[0].text
        if head == "not":
            if len(lst.items) != 2:
                raise PDDLSyntaxError("'not' takes exactly one argument", *_where(lst))
            return Effect(parse_atom(lst.items[1]), positive=False)
        if head in ("and", "or", "when", "forall", "increase"):
            raise PDDLSyntaxError(f"unsupported effect {head!r}", *_where(lst))
    return Effect(parse_atom(lst), positive=True)


def parse_effect(node: Node) -> tuple[Effect, ...]:
    lst = _list(node, "effect")
    if not lst.items:
        return ()
    if isinstance(lst.items[0], Token) and lst.items[0].text == "and":
        return tuple(_parse_literal(n) for n in lst.items[1:])
    return (_parse_literal(lst),)


def _header(root: SList, kind: str) -> tuple[str, list[Node]]:
    items = root.items
    if len(items) < 2 or _word(items[0], "'define'") != "define":
        raise PDDLSyntaxError("expected (define ...)", *_where(root))
    head = _list(items[1], f"({kind} <name>)")
    if len(head.items) != 2 or _word(head.items[0], kind) != kind:
        raise PDDLSyntaxError(f"expected ({kind} <name>)", *_where(head))
    return _ident(head.items[1], f"{kind} name"), items[2:]


def _section(node: Node) -> tuple[str, SList]:
    lst = _list(node, "section")
    if not lst.items:
        raise PDDLSyntaxError("empty section", *_where(lst))
    key = _word(lst.items[0], "section keyword")
    if not key.startswith(":"):
        raise PDDLSyntaxError(f"expected a ':section', found {key!r}", *_where(lst))
    return key, lst


def _parse_action(lst: SList) -> ActionSchema:
    items = lst.items
    if len(items) < 2:
        raise PDDLSyntaxError("action without a name", *_where(lst))
    name = _ident(items[1], "action name")
    params: list[TypedName] = []
    pre: Condition = And(())
    effects: tuple[Effect, ...] = ()
    seen = set()
    i = 2
    while i < len(items):
        key = _word(items[i], "action keyword")
        if i + 1 >= len(items):
            raise PDDLSyntaxError(f"missing value for {key}", *_where(items[i]))
        if key in seen:
            raise PDDLSyntaxError(f"duplicate {key}", *_where(items[i]))
        seen.add(key)
        value = items[i + 1]
        if key == ":parameters":
            params = _typed_list(_list(value, "parameter list").items, variables=True)
        elif key == ":precondition":
            pre = parse_condition(value)
        elif key == ":effect":
            effects = parse_effect(value)
        else:
            raise PDDLSyntaxError(f"unsupported action keyword {key!r}", *_where(items[i]))
        i += 2
    bound = {p.name for p in params}
    if len(bound) != len(params):
        raise PDDLSyntaxError(f"duplicate parameter in action {name!r}", *_where(lst))
    for atom in list(iter_atoms(pre)) + [e.atom for e in effects]:
        for arg in atom.args:
            if arg.startswith("?") and arg not in bound:
                raise PDDLSyntaxError(f"unbound variable {arg} in action {name!r}", *_where(lst))
    return ActionSchema(name, tuple(params), pre, effects)


def parse_domain(text: str) -> DomainFile:
    root = read_sexpr(text)
    name, rest = _header(root, "domain")
    requirements: set[str] = set()
    types: list[TypedName] = []
    predicates: list[PredicateDecl] = []
    actions: list[ActionSchema] = []
    for node in rest:
        key, lst = _section(node)
        if key == ":requirements":
            for tok in lst.items[1:]:
                flag = _word(tok, "requirement flag")
                if flag not in REQUIREMENTS:
                    raise UnsupportedRequirement(f"unsupported requirement {flag}")
                requirements.add(flag)
        elif key == ":types":
            types.extend(_typed_list(lst.items[1:], variables=False))
        elif key == ":predicates":
            for decl in lst.items[1:]:
                d = _list(decl, "predicate declaration")
                if not d.items:
                    raise PDDLSyntaxError("empty predicate declaration", *_where(d))
                pname = _ident(d.items[0], "predicate")
                if any(p.name == pname for p in predicates):
                    raise PDDLSyntaxError(f"duplicate predicate {pname!r}", *_where(d))
                predicates.append(PredicateDecl(pname, tuple(_typed_list(d.items[1:], variables=True))))
        elif key == ":action":
            action = _parse_action(lst)
            if any(a.name == action.name for a in actions):
                raise PDDLSyntaxError(f"duplicate action {action.name!r}", *_where(lst))
            actions.append(action)
        else:
            raise PDDLSyntaxError(f"unsupported domain section {key!r}", *_where(lst))
    return DomainFile(name, frozenset(requirements), tuple(types), tuple(predicates), tuple(actions))


def parse_problem(text: str) -> ProblemFile:
    root = read_sexpr(text)
    name, rest = _header(root, "problem")
    domain = ""
    objects: list[TypedName] = []
    init: set[Atom] = set()
    goal: Condition = And(())
    for node in rest:
        key, lst = _section(node)
        if key == ":domain":
            if len(lst.items) != 2:
                raise PDDLSyntaxError("expected (:domain <name>)", *_where(lst))
            domain = _ident(lst.items[1], "domain name")
        elif key == ":objects":
            objects.extend(_typed_list(lst.items[1:], variables=False))
        elif key == ":init":
            for n in lst.items[1:]:
                init.add(parse_atom(n))
        elif key == ":goal":
            if len(lst.items) != 2:
                raise PDDLSyntaxError("expected exactly one goal condition", *_where(lst))
            goal = parse_condition(lst.items[1])
        else:
            raise PDDLSyntaxError(f"unsupported problem section {key!r}", *_where(lst))
    return ProblemFile(name, domain, tuple(objects), frozenset(init), goal)


def parse_ground_atom(text: str) -> Atom:
    """Parse a single line like ``(connected kitchen loc1 south)``."""
    root = read_sexpr(text)
    atom = parse_atom(root)
    if not atom.is_ground:
        raise PDDLSyntaxError(f"atom {atom} is not ground", root.line, root.column)
    return atom


def parse_condition_text(text: str) -> Condition:
    return parse_condition(read_sexpr(text))


def parse_object_line(text: str) -> TypedName:
    """Parse a declaration like ``loc1 - location``."""
    parts = text.lower().split()
    if len(parts) != 3 or parts[1] != "-":
        raise PDDLSyntaxError(f"expected '<name> - <type>', got {text!r}", 1, 1)
    for p in (parts[0], parts[2]):
        if not IDENT.match(p) or p in _KEYWORDS:
            raise PDDLSyntaxError(f"invalid identifier {p!r}", 1, 1)
    return TypedName(parts[0], parts[2])
