from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .base import Mode, TranslatorRequest, TranslatorResponse
from .oracle import OracleTranslator

FAULT_KINDS = ("drop-fact", "undeclared-object", "syntax-error", "delete-visited")


@dataclass(frozen=True)
class FaultProfile:
    probability: float = 0.0
    kinds: tuple[str, ...] = ("syntax-error",)
    seed: int | str = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"fault probability must be in [0, 1], got {self.probability}")
        unknown = set(self.kinds) - set(FAULT_KINDS)
        if unknown or not self.kinds:
            raise ValueError(f"unknown or empty fault kinds: {sorted(unknown)}")


@dataclass
class Corruption:
    call: int
    kind: str
    detail: str


def _drop_fact(text: str, mode: Mode, rng: random.Random) -> tuple[str, str]:
    if mode == Mode.DELTA:
        data = json.loads(text)
        adds = data["init"]["add"]
        if not adds:
            return text, "nothing to drop"
        pool = [a for a in adds if a.startswith("(connected")] or adds
        victim = rng.choice(pool)
        adds.remove(victim)
        return json.dumps(data, indent=2), victim
    lines = text.splitlines()
    facts = [i for i, ln in enumerate(lines) if ln.strip().startswith("(connected")]
    facts = facts or [i for i, ln in enumerate(lines) if ln.strip().startswith("(") and ln.startswith("    ")]
    if not facts:
        return text, "nothing to drop"
    i = rng.choice(facts)
    victim = lines.pop(i).strip()
    return "\n".join(lines) + "\n", victim


def _undeclared(text: str, mode: Mode, call: int) -> tuple[str, str]:
    fact = f"(visited ghost_{call})"
    if mode == Mode.DELTA:
        data = json.loads(text)
        data["init"]["add"].append(fact)
        return json.dumps(data, indent=2), fact
    return text.replace("(:init", f"(:init\n    {fact}", 1), fact


def _syntax_error(text: str) -> tuple[str, str]:
    stripped = text.rstrip()
    return stripped[:-1], f"dropped trailing {stripped[-1]!r}"


def _delete_visited(text: str, mode: Mode) -> tuple[str, str]:
    if mode == Mode.DELTA:
        data = json.loads(text)
        visited = [a for a in data["init"]["add"] if a.startswith("(visited")]
        fact = visited[0] if visited else "(visited kitchen)"
        data["init"]["delete"].append(fact)
        if fact in data["init"]["add"]:
            data["init"]["add"].remove(fact)
        return json.dumps(data, indent=2), fact
    lines = [ln for ln in text.splitlines() if not ln.strip().startswith("(visited")]
    return "\n".join(lines) + "\n", "removed visited facts"


@dataclass
class FaultyTranslator:
    """Oracle output corrupted at a seeded rate; every corruption is logged."""

    profile: FaultProfile = field(default_factory=FaultProfile)
    inner: OracleTranslator = field(default_factory=OracleTranslator)
    log: list[Corruption] = field(default_factory=list)
    name: str = "faulty"

    def __post_init__(self) -> None:
        self._rng = random.Random(self.profile.seed)
        self._calls = 0

    def translate(self, request: TranslatorRequest) -> TranslatorResponse:
        self._calls += 1
        response = self.inner.translate(request)
        if request.mode == Mode.ACTION or self._rng.random() >= self.profile.probability:
            return response
        kind = self._rng.choice(self.profile.kinds)
        text = response.text
        if kind == "drop-fact":
            text, detail = _drop_fact(text, request.mode, self._rng)
        elif kind == "undeclared-object":
            text, detail = _undeclared(text, request.mode, self._calls)
        elif kind == "syntax-error":
            text, detail = _syntax_error(text)
        else:
            text, detail = _delete_visited(text, request.mode)
        self.log.append(Corruption(self._calls, kind, detail))
        return TranslatorResponse(request.mode, text, text)
