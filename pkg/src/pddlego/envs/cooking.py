from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .base import DIRECTIONS, RoomGraph, TextEnv, generate_layout, join_items

KNIFE_STEPS = ("slice", "chop", "dice")
COOK_STEPS = ("grill", "roast", "fry")
APPLIANCE_STEP = {"stove": "fry", "oven": "roast", "toaster": "grill", "barbeque": "grill"}
PAST = {"slice": "sliced", "chop": "chopped", "dice": "diced", "grill": "grilled", "roast": "roasted", "fry": "fried"}

PRODUCE = (
    "block of cheese",
    "red apple",
    "yellow potato",
    "carrot",
    "red onion",
    "yellow bell pepper",
    "purple potato",
    "red potato",
    "white onion",
    "banana",
    "red hot pepper",
    "orange bell pepper",
    "chicken wing",
    "pork chop",
    "green apple",
    "tomato",
)
SEASONINGS = ("salt", "black pepper")

# (name, kind) where kind is appliance, container or surface
FURNITURE: dict[str, tuple[tuple[str, str], ...]] = {
    "kitchen": (
        ("fridge", "container"),
        ("counter", "surface"),
        ("kitchen cupboard", "container"),
        ("cutlery drawer", "container"),
        ("trash can", "container"),
        ("dishwasher", "container"),
        ("dining chair", "surface"),
    ),
    "pantry": (("folding chair", "surface"), ("shelf", "surface")),
    "corridor": (
        ("key holder", "surface"),
        ("shoe cabinet", "container"),
        ("umbrella stand", "surface"),
        ("hat rack", "surface"),
    ),
    "bedroom": (
        ("dressing table", "surface"),
        ("desk", "surface"),
        ("chest of drawers", "container"),
        ("wardrobe", "container"),
        ("night stand", "surface"),
    ),
    "backyard": (
        ("workbench", "surface"),
        ("patio table", "surface"),
        ("patio chair", "surface"),
        ("garden", "surface"),
    ),
    "living room": (("sofa", "surface"), ("bookcase", "container"), ("coffee table", "surface")),
    "bathroom": (("bathroom cabinet", "container"), ("toilet", "surface"), ("bath mat", "surface")),
    "laundry room": (
        ("washing machine", "container"),
        ("laundry basket", "container"),
        ("work table", "surface"),
    ),
}
OTHER_ROOMS = tuple(r for r in FURNITURE if r != "kitchen")

DIFFICULTY = {
    # rooms, ingredients, step cap, closed containers allowed in kitchen / elsewhere
    "easy": {"rooms": 2, "ingredients": 2, "step_cap": 20, "kitchen_containers": 2, "room_containers": 1},
    "hard": {"rooms": 5, "ingredients": 5, "step_cap": 50, "kitchen_containers": 3, "room_containers": 1},
}

RECIPE_HEADER = "Gather all following ingredients and follow the directions to prepare this tasty meal."


@dataclass(frozen=True)
class Ingredient:
    name: str
    knife: str | None = None
    cook: str | None = None

    @property
    def steps(self) -> tuple[str, ...]:
        return tuple(s for s in (self.knife, self.cook) if s)


@dataclass(frozen=True)
class Recipe:
    ingredients: tuple[Ingredient, ...]

    def __post_init__(self) -> None:
        names = [i.name for i in self.ingredients]
        if not names or len(set(names)) != len(names):
            raise ValueError("a recipe needs at least one ingredient and unique names")

    def get(self, name: str) -> Ingredient | None:
        for i in self.ingredients:
            if i.name == name:
                return i
        return None

    def render(self) -> str:
        directions = [f"{s} the {i.name}" for i in self.ingredients for s in i.steps] + ["prepare meal"]
        return (
            f"{RECIPE_HEADER}\nIngredients:\n  {', '.join(i.name for i in self.ingredients)}\n"
            f"Directions:\n  {', '.join(directions)}"
        )


def parse_recipe(text: str) -> Recipe:
    """Inverse of `Recipe.render`."""
    m = re.search(r"Ingredients:\s*\n\s*(.+?)\s*\nDirections:\s*\n\s*(.+)", text, re.S)
    if not m:
        raise ValueError("not a recipe")
    names = [n.strip() for n in m.group(1).split(",") if n.strip()]
    knife: dict[str, str] = {}
    cook: dict[str, str] = {}
    for step in m.group(2).strip().split(","):
        step = step.strip()
        verb, _, rest = step.partition(" the ")
        if verb in KNIFE_STEPS:
            knife[rest] = verb
        elif verb in COOK_STEPS:
            cook[rest] = verb
    return Recipe(tuple(Ingredient(n, knife.get(n), cook.get(n)) for n in names))


def article(item: str) -> str:
    if item in SEASONINGS:
        return f"some {item}"
    return f"{'an' if item[0] in 'aeiou' else 'a'} {item}"


@dataclass
class Fixture:
    name: str
    kind: str
    room: str
    contents: list[str] = field(default_factory=list)
    is_open: bool = False


SENTENCE_STARTS = (
    "In one part of the room you see",
    "There is also",
    "You also see",
    "In another part of the room you see",
)


class CookingEnv(TextEnv):
    """Read the cookbook, gather and process ingredients, then prepare and eat the meal."""

    kind = "cooking"

    def __init__(self, graph: RoomGraph, start: str, recipe: Recipe, fixtures: list[Fixture], step_cap: int, difficulty: str = "custom"):
        super().__init__(graph, start, step_cap)
        self.recipe = recipe
        self.fixtures = fixtures
        self.difficulty = difficulty
        self.inventory: list[str] = []
        self.status: dict[str, list[str]] = {i.name: [] for i in recipe.ingredients}
        self.cookbook_read = False
        self.meal_prepared = False
        self.meal_eaten = False

    # -- lookup -----------------------------------------------------------

    def fixtures_in(self, room: str) -> list[Fixture]:
        return [f for f in self.fixtures if f.room == room]

    def fixture(self, name: str, room: str | None = None) -> Fixture | None:
        for f in self.fixtures:
            if f.name == name and (room is None or f.room == room):
                return f
        return None

    def appliances(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for f in self.fixtures:
            if f.kind == "appliance":
                out.setdefault(f.room, set()).add(f.name)
        return out

    def visible_items(self, room: str) -> list[str]:
        items = []
        for f in self.fixtures_in(room):
            if f.kind == "surface" or (f.kind == "container" and f.is_open):
                items.extend(f.contents)
        return items

    def cookbook_here(self) -> bool:
        return "cookbook" in self.visible_items(self.room)

    # -- rendering --------------------------------------------------------

    def _phrase(self, f: Fixture) -> str:
        items = [article(i) for i in f.contents]
        if f.kind == "appliance":
            return article(f.name)
        if f.kind == "container":
            if not f.is_open:
                return f"{article(f.name)} that is closed"
            if items:
                return f"{article(f.name)} that is open and contains {join_items(items)}"
            return f"{article(f.name)} that is open and empty"
        if items:
            return f"{article(f.name)} that has {join_items(items)} on it"
        return f"{article(f.name)}, that has nothing on it"

    def describe_contents(self, room: str) -> str:
        sentences = []
        for i, f in enumerate(self.fixtures_in(room)):
            sentences.append(f"{SENTENCE_STARTS[i % len(SENTENCE_STARTS)]} {self._phrase(f)}.")
        return " ".join(sentences)

    def valid_actions(self) -> list[str]:
        if self.terminal != "ongoing":
            return []
        acts = ["look around"]
        if self.cookbook_here():
            acts.append("examine cookbook")
        for d, e in self.graph.exits(self.room):
            acts.append(f"move {d}")
            if e.door:
                acts.append(f"open door to {d}")
        here = self.fixtures_in(self.room)
        acts.extend(f"open {f.name}" for f in here if f.kind == "container")
        acts.extend(f"take {i}" for i in self.visible_items(self.room) if i != "cookbook")
        held = [i for i in self.inventory if i in self.status]
        if "knife" in self.inventory:
            acts.extend(f"{verb} {i}" for i in held for verb in KNIFE_STEPS)
        for f in here:
            if f.kind == "appliance":
                acts.extend(f"cook {i} in {f.name}" for i in held)
        if self.room == "kitchen" and not self.meal_prepared:
            acts.append("prepare meal")
        if self.meal_prepared:
            acts.append("eat meal")
        return acts

    # -- dynamics ---------------------------------------------------------

    def _lose(self, text: str, reason: str) -> str:
        self.terminal = "failure"
        self.reason = reason
        return f"{text} That was not what the recipe asked for. You lost!"

    def _knife(self, verb: str, item: str) -> str | None:
        if item not in self.status or item not in self.inventory or "knife" not in self.inventory:
            return None
        ing = self.recipe.get(item)
        done = self.status[item]
        text = f"You {verb} the {item}."
        if ing.knife != verb or verb in done:
            return self._lose(text, f"{item} should not be {PAST[verb]}")
        done.append(verb)
        return text

    def _cook(self, item: str, appliance: str) -> str | None:
        f = self.fixture(appliance, self.room)
        if item not in self.status or item not in self.inventory or f is None or f.kind != "appliance":
            return None
        step = APPLIANCE_STEP[appliance]
        ing = self.recipe.get(item)
        done = self.status[item]
        text = f"You {step} the {item} with the {appliance}."
        if ing.cook != step or step in done:
            return self._lose(text, f"{item} should not be {PAST[step]}")
        if ing.knife and ing.knife not in done:
            return self._lose(text, f"{item} was not {PAST[ing.knife]} before being {PAST[step]}")
        done.append(step)
        return text

    def _dispatch(self, command: str) -> str | None:
        verb, _, rest = command.partition(" ")
        if command == "look around":
            return self.describe()
        if command == "examine cookbook":
            if not self.cookbook_here():
                return None
            self.cookbook_read = True
            return self.recipe.render()
        if verb == "move" and rest in DIRECTIONS:
            return self._move(rest)
        if command.startswith("open door to ") and command[13:] in DIRECTIONS:
            return self._open_door(command[13:])
        if verb == "open":
            f = self.fixture(rest, self.room)
            if f is None or f.kind != "container" or f.is_open:
                return None
            f.is_open = True
            if f.contents:
                return f"You open the {f.name}. The {f.name} contains {join_items([article(i) for i in f.contents])}."
            return f"You open the {f.name}. It's empty inside."
        if verb == "take":
            if rest == "cookbook" or rest not in self.visible_items(self.room):
                return None
            for f in self.fixtures_in(self.room):
                if rest in f.contents:
                    f.contents.remove(rest)
                    break
            self.inventory.append(rest)
            return f"You take the {rest}."
        if verb in KNIFE_STEPS:
            return self._knife(verb, rest)
        if verb == "cook":
            m = re.fullmatch(r"(.+) in (.+)", rest)
            return self._cook(m.group(1), m.group(2)) if m else None
        if command == "prepare meal":
            if self.room != "kitchen" or self.meal_prepared:
                return None
            for ing in self.recipe.ingredients:
                if ing.name not in self.inventory or set(ing.steps) != set(self.status[ing.name]):
                    return None
            for ing in self.recipe.ingredients:
                self.inventory.remove(ing.name)
            self.inventory.append("meal")
            self.meal_prepared = True
            return "Adding the meal to your inventory."
        if command == "eat meal":
            if "meal" not in self.inventory:
                return None
            self.inventory.remove("meal")
            self.meal_eaten = True
            self.terminal = "success"
            return "You eat the meal. It is delicious."
        return None

    # -- introspection ----------------------------------------------------

    def _clone_extra(self, other: TextEnv) -> None:
        other.fixtures = [Fixture(f.name, f.kind, f.room, list(f.contents), f.is_open) for f in self.fixtures]
        other.inventory = list(self.inventory)
        other.status = {k: list(v) for k, v in self.status.items()}

    def state_key(self) -> tuple:
        return super().state_key() + (
            tuple((f.name, tuple(f.contents), f.is_open) for f in self.fixtures),
            tuple(sorted(self.inventory)),
            tuple((k, tuple(v)) for k, v in sorted(self.status.items())),
            self.meal_prepared,
        )

    def snapshot(self) -> dict:
        snap = super().snapshot()
        snap.update(
            {
                "difficulty": self.difficulty,
                "recipe": [{"name": i.name, "knife": i.knife, "cook": i.cook} for i in self.recipe.ingredients],
                "fixtures": [
                    {"name": f.name, "kind": f.kind, "room": f.room, "contents": list(f.contents), "open": f.is_open}
                    for f in self.fixtures
                ],
                "inventory": list(self.inventory),
                "status": {k: list(v) for k, v in sorted(self.status.items())},
                "cookbook_read": self.cookbook_read,
                "meal_prepared": self.meal_prepared,
                "meal_eaten": self.meal_eaten,
            }
        )
        return snap


def _pick_recipe(rng: random.Random, count: int, need_grill: bool) -> Recipe:
    seasonings = rng.randint(0, min(2, count - 1)) if count > 1 else 0
    names = rng.sample(SEASONINGS, seasonings) + rng.sample(PRODUCE, count - seasonings)
    rng.shuffle(names)
    ings = []
    for name in names:
        if name in SEASONINGS:
            ings.append(Ingredient(name))
            continue
        knife = rng.choice((None,) + KNIFE_STEPS)
        cook = rng.choice((None,) + COOK_STEPS)
        ings.append(Ingredient(name, knife, cook))
    if need_grill and not any(i.cook == "grill" for i in ings):
        produce = [k for k, i in enumerate(ings) if i.name not in SEASONINGS]
        k = rng.choice(produce)
        ings[k] = Ingredient(ings[k].name, ings[k].knife, "grill")
    return Recipe(tuple(ings))


def gen_cooking_env(seed: int, difficulty: str = "easy") -> CookingEnv:
    if difficulty not in DIFFICULTY:
        raise ValueError(f"unknown difficulty {difficulty!r}")
    cfg = DIFFICULTY[difficulty]
    rng = random.Random(f"cooking:{seed}:{difficulty}")
    others = list(OTHER_ROOMS)
    rng.shuffle(others)
    if difficulty == "hard":
        others.remove("backyard")
        rooms = ["kitchen", "backyard"] + others[: cfg["rooms"] - 2]
    else:
        rooms = ["kitchen"] + others[: cfg["rooms"] - 1]
    graph = generate_layout(rng, rooms)

    recipe = _pick_recipe(rng, cfg["ingredients"], need_grill=(difficulty == "hard"))
    needs_grill = any(i.cook == "grill" for i in recipe.ingredients)

    fixtures: list[Fixture] = []
    for room in rooms:
        limit = cfg["kitchen_containers"] if room == "kitchen" else cfg["room_containers"]
        catalog = list(FURNITURE[room])
        containers = [c for c in catalog if c[1] == "container"]
        if room == "kitchen":
            keep = [containers[0]] + rng.sample(containers[1:], min(limit - 1, len(containers) - 1))
            fixtures.append(Fixture("stove", "appliance", room))
            fixtures.append(Fixture("oven", "appliance", room))
        else:
            keep = rng.sample(containers, min(rng.randint(0, limit), len(containers)))
        if room == "backyard":
            fixtures.append(Fixture("barbeque", "appliance", room))
        for name, kind in catalog:
            if kind == "surface" or (name, kind) in keep:
                fixtures.append(Fixture(name, kind, room))

    has_bbq = "backyard" in rooms
    non_kitchen = [r for r in rooms if r != "kitchen"]
    toaster_room = None
    if difficulty == "hard":
        if rng.random() < 0.5:
            toaster_room = rng.choice(non_kitchen)
    elif needs_grill and not has_bbq:
        toaster_room = rng.choice(rooms)
    elif rng.random() < 0.5:
        toaster_room = rng.choice(rooms)
    if toaster_room is not None:
        idx = max(i for i, f in enumerate(fixtures) if f.room == toaster_room) + 1
        fixtures.insert(idx, Fixture("toaster", "appliance", toaster_room))

    counter = next(f for f in fixtures if f.name == "counter")
    counter.contents.append("cookbook")
    knife_spots = [f for f in fixtures if f.room == "kitchen" and f.name in ("counter", "cutlery drawer")]
    rng.choice(knife_spots).contents.insert(0, "knife")
    spots = [f for f in fixtures if f.kind != "appliance"]
    for ing in recipe.ingredients:
        rng.choice(spots).contents.insert(0, ing.name)

    return CookingEnv(graph, "kitchen", recipe, fixtures, cfg["step_cap"], difficulty)
