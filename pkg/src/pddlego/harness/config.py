from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..agent import Strategy
from ..translator import FAULT_KINDS

TRANSLATORS = ("oracle", "faulty", "llm", "none")
DEV_SEEDS = tuple(range(0, 10))
TEST_SEEDS = tuple(range(10, 60))


class ConfigError(ValueError):
    pass


def parse_seeds(text: str | list | tuple | range) -> tuple[int, ...]:
    """Accept ``"10..59"``, ``"1,2,5..7"`` or a list of ints."""
    if isinstance(text, (list, tuple, range)):
        return tuple(int(s) for s in text)
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ConfigError(f"empty seed range {part!r}")
            out.extend(range(lo, hi + 1))
        elif re.fullmatch(r"-?\d+", part):
            out.append(int(part))
        else:
            raise ConfigError(f"cannot parse seed spec {part!r}")
    return tuple(out)


@dataclass(frozen=True)
class SuiteConfig:
    env: str = "coin"
    difficulty: str | None = None
    seeds: tuple[int, ...] = TEST_SEEDS
    trials: int = 1
    strategy: str = "pddl-edit"
    translator: str = "oracle"
    rooms: int | None = None
    step_cap: int | None = None
    max_retries: int = 5
    max_expansions: int = 200_000
    solver_timeout: float | None = None
    fault_probability: float = 0.0
    fault_kinds: tuple[str, ...] = ("syntax-error",)
    fault_seed: int = 0
    endpoint: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    temperature: float = 1.0
    cassette: str | None = None
    cassette_mode: str = "replay"
    out: str | None = None
    parallel: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "seeds", parse_seeds(self.seeds))
        object.__setattr__(self, "fault_kinds", tuple(self.fault_kinds))
        if not self.seeds:
            raise ConfigError("seed range must be nonempty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seed list has duplicates")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.env not in ("coin", "cooking"):
            raise ConfigError(f"unknown env {self.env!r}")
        if self.env == "cooking" and self.difficulty not in (None, "easy", "hard"):
            raise ConfigError(f"unknown difficulty {self.difficulty!r}")
        try:
            Strategy(self.strategy)
        except ValueError:
            raise ConfigError(f"unknown strategy {self.strategy!r}") from None
        if self.translator not in TRANSLATORS:
            raise ConfigError(f"unknown translator {self.translator!r}")
        if self.strategy != "random" and self.translator == "none":
            raise ConfigError(f"strategy {self.strategy} needs a translator")
        if not 0.0 <= self.fault_probability <= 1.0:
            raise ConfigError("fault probability must be within [0, 1]")
        if set(self.fault_kinds) - set(FAULT_KINDS):
            raise ConfigError(f"fault kinds must come from {FAULT_KINDS}")
        if self.parallel < 1:
            raise ConfigError("parallel must be at least 1")

    @property
    def translator_label(self) -> str:
        return "none" if self.strategy == "random" else self.translator

    def to_json(self) -> dict:
        data = asdict(self)
        data["seeds"] = list(self.seeds)
        data["fault_kinds"] = list(self.fault_kinds)
        return data

    def with_overrides(self, **overrides) -> SuiteConfig:
        known = {f.name for f in fields(self)}
        bad = set(overrides) - known
        if bad:
            raise ConfigError(f"unknown config keys: {sorted(bad)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_config(path: str | Path | None = None, **overrides) -> SuiteConfig:
    data: dict = {}
    if path is not None:
        p = Path(path)
        text = p.read_text(encoding="utf-8")
        try:
            data = tomllib.loads(text) if p.suffix == ".toml" else json.loads(text)
        except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {p}: {exc}") from exc
        data = {k.replace("-", "_"): v for k, v in data.items()}
    base = SuiteConfig()
    return base.with_overrides(**data).with_overrides(**overrides)


__all__ = ["ConfigError", "DEV_SEEDS", "SuiteConfig", "TEST_SEEDS", "load_config", "parse_seeds"]
