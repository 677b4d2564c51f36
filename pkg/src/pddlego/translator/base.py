from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Protocol


class Mode(str, Enum):
    INIT = "init-problem"
    DELTA = "delta"
    ACTION = "action"


class TranslatorError(Exception):
    """Base class for translator failures."""


class UnrecognizedObservation(TranslatorError):
    pass


class TransportError(TranslatorError):
    pass


class ModelRefusal(TranslatorError):
    pass


class BudgetExceeded(TranslatorError):
    pass


@dataclass(frozen=True)
class TranslatorRequest:
    """One call across the model boundary.

    ``observation`` is a transcript fragment: ``< command`` lines followed by
    ``> observation`` lines, as produced by `envs.transcript`.
    """

    mode: Mode
    observation: str
    problem: str | None = None
    history: tuple[str, ...] = ()
    valid_actions: tuple[str, ...] = ()
    domain: str = "coin"

    def __post_init__(self) -> None:
        if self.mode == Mode.DELTA and not self.problem:
            raise ValueError("delta requests need the prior problem file")
        if self.mode == Mode.ACTION and not self.valid_actions:
            raise ValueError("action requests need a non-empty list of valid actions")


@dataclass(frozen=True)
class TranslatorResponse:
    mode: Mode
    text: str
    raw: str = ""


class Translator(Protocol):
    name: str

    def translate(self, request: TranslatorRequest) -> TranslatorResponse: ...


def split_transcript(text: str) -> list[tuple[str | None, str]]:
    """Split a ``< cmd`` / ``> obs`` log into (command, observation) pairs."""
    pairs: list[tuple[str | None, str]] = []
    command: str | None = None
    obs: list[str] | None = None
    for line in text.splitlines():
        if line.startswith("< "):
            if obs is not None:
                pairs.append((command, "\n".join(obs).strip()))
            command, obs = line[2:].strip(), None
        elif line.startswith("> "):
            if obs is not None:
                pairs.append((command, "\n".join(obs).strip()))
                command = None
            obs = [line[2:]]
        elif obs is not None:
            obs.append(line)
        elif line.strip():
            obs = [line]
    if obs is not None:
        pairs.append((command, "\n".join(obs).strip()))
    return pairs


def format_exchange(command: str | None, observation: str) -> str:
    return (f"< {command}\n" if command else "") + f"> {observation}\n"
