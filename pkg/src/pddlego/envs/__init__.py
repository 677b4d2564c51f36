from .base import (
    DIRECTIONS,
    REVERSE,
    Edge,
    Observation,
    RoomGraph,
    StepStatus,
    TextEnv,
    generate_layout,
    transcript,
)
from .coin import CoinEnv, gen_coin_env
from .cooking import CookingEnv, Ingredient, Recipe, gen_cooking_env, parse_recipe


def make_env(
    kind: str,
    seed: int,
    difficulty: str | None = None,
    rooms: int | None = None,
    step_cap: int | None = None,
) -> TextEnv:
    if kind == "coin":
        env: TextEnv = gen_coin_env(seed, rooms or 11)
    elif kind == "cooking":
        env = gen_cooking_env(seed, difficulty or "easy")
    else:
        raise ValueError(f"unknown environment {kind!r}")
    if step_cap is not None:
        env.step_cap = step_cap
    return env


__all__ = [
    "DIRECTIONS",
    "REVERSE",
    "CoinEnv",
    "CookingEnv",
    "Edge",
    "Ingredient",
    "Observation",
    "Recipe",
    "RoomGraph",
    "StepStatus",
    "TextEnv",
    "gen_coin_env",
    "gen_cooking_env",
    "generate_layout",
    "make_env",
    "parse_recipe",
    "transcript",
]
