from __future__ import annotations

from dataclasses import dataclass, field

import pytest

from helpers import HERE
from pddlego.agent import (
    AgentConfig,
    Knowledge,
    MissingDirection,
    build_subgoals,
    ground_action_to_command,
    order_plan,
    run_episode,
    trace_lines,
)
from pddlego.envs import Ingredient, Recipe, gen_coin_env, gen_cooking_env
from pddlego.pddl import And, Atom, Or, load_domain, parse_problem
from pddlego.planner import GroundAction, Plan, ground, solve, validate_plan
from pddlego.translator import (
    BudgetExceeded,
    FaultProfile,
    FaultyTranslator,
    Mode,
    OracleTranslator,
    TranslatorResponse,
)

PF1 = parse_problem((HERE / "pf1.pddl").read_text())
COOKING = load_domain("cooking")


def _act(name, *args):
    return GroundAction(name, tuple(args), And(()), frozenset(), frozenset())


def test_open_door_command():
    pf = PF1.replace(init=PF1.init | {Atom("connected", ("kitchen", "unk_1", "south"))})
    assert ground_action_to_command(_act("open_door", "kitchen", "unk_1"), pf) == "open door to south"
    assert ground_action_to_command(_act("move", "kitchen", "loc2", "east"), PF1) == "move east"


def test_cook_and_knife_commands():
    assert ground_action_to_command(_act("use_barbeque", "yellow_potato", "backyard", "barbeque"), PF1) == (
        "cook yellow potato in barbeque"
    )
    assert ground_action_to_command(_act("slice", "block_of_cheese", "knife"), PF1) == "slice block of cheese"


def test_missing_direction():
    with pytest.raises(MissingDirection):
        ground_action_to_command(_act("move", "loc1", "loc2", "north"), PF1)
    with pytest.raises(MissingDirection):
        ground_action_to_command(_act("open_door", "loc2", "kitchen"), PF1)


def test_order_plan_hoists_knife_step():
    plan = Plan((_act("use_barbeque", "potato", "backyard", "barbeque"), _act("chop", "potato", "knife")))
    assert [s.name for s in order_plan(plan)] == ["chop", "use_barbeque"]


def test_order_plan_leaves_other_plans_alone():
    plan = Plan((_act("move", "a", "b", "north"), _act("dice", "apple", "knife"), _act("move", "b", "a", "south")))
    assert order_plan(plan) == plan


def test_order_plan_keeps_navigation_fixed():
    steps = (
        _act("move", "kitchen", "backyard", "north"),
        _act("use_barbeque", "potato", "backyard", "barbeque"),
        _act("slice", "cheese", "knife"),
        _act("move", "backyard", "kitchen", "south"),
        _act("chop", "potato", "knife"),
    )
    out = order_plan(Plan(steps))
    assert [str(s) for s in out] == [
        "(move kitchen backyard north)",
        "(chop potato knife)",
        "(use_barbeque potato backyard barbeque)",
        "(slice cheese knife)",
        "(move backyard kitchen south)",
    ]


def test_reordered_cooking_plan_still_validates():
    pf = parse_problem(
        "(define (problem p) (:domain environment)"
        " (:objects kitchen - location stove - stove knife - knife potato - ingredient)"
        " (:init (at kitchen) (obj_at stove kitchen) (have knife) (have potato))"
        " (:goal (and (fried potato) (chopped potato))))"
    )
    task = ground(COOKING, pf)
    plan = solve(task)
    assert validate_plan(task, plan) and validate_plan(task, order_plan(plan))
    assert order_plan(plan).steps[0].name == "chop"


def test_coin_subgoals():
    stack = build_subgoals("coin")
    names = [n for n, _ in stack.goals(PF1, Knowledge("coin"))]
    assert names == ["explore"]
    goals = dict(stack.goals(PF1, Knowledge("coin", coin_room="kitchen")))
    assert goals["reach-coin"] == Atom("at", ("kitchen",))
    assert solve(ground(load_domain("coin"), PF1).with_goal(goals["reach-coin"])) == Plan()
    assert goals["explore"] == Or((Atom("at", ("loc1",)), Atom("at", ("loc2",))))


def test_cooking_hard_goal():
    recipe = Recipe(
        (
            Ingredient("block of cheese", "slice"),
            Ingredient("red apple", "dice"),
            Ingredient("yellow potato", "chop", "grill"),
        )
    )
    pf = parse_problem(
        "(define (problem p) (:domain environment)"
        " (:objects kitchen backyard - location barbeque - barbeque knife - knife"
        " block_of_cheese red_apple yellow_potato - ingredient)"
        " (:init (at kitchen) (obj_at barbeque backyard) (have knife)"
        " (have block_of_cheese) (have red_apple) (have yellow_potato))"
        " (:goal (and)))"
    )
    goals = dict(build_subgoals("cooking").goals(pf, Knowledge("cooking", recipe)))
    assert str(goals["recipe-complete"]) == (
        "(and (sliced block_of_cheese) (diced red_apple) (chopped yellow_potato) (grilled yellow_potato) (at kitchen))"
    )
    without_bbq = pf.replace(init=pf.init - {Atom("obj_at", ("barbeque", "backyard"))})
    assert "recipe-complete" not in dict(build_subgoals("cooking").goals(without_bbq, Knowledge("cooking", recipe)))


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_subgoals("chess")


@dataclass
class Scripted:
    """Returns canned texts and records every request."""

    texts: list[str]
    requests: list = field(default_factory=list)
    name: str = "scripted"

    def translate(self, request):
        self.requests.append(request)
        text = self.texts[min(len(self.requests) - 1, len(self.texts) - 1)]
        return TranslatorResponse(request.mode, text, text)


def test_retries_exhausted_after_five():
    bad = Scripted(["(define (problem"])
    result = run_episode(gen_coin_env(12), "pddl-edit", bad)
    assert not result.success
    assert result.failure_reason.startswith("RetriesExhausted: ")
    assert result.retries == [5]
    assert len(bad.requests) == 6
    assert result.steps == 0


def test_retry_budget_is_configurable():
    bad = Scripted(["nope"])
    result = run_episode(gen_coin_env(12), "pddl-gen", bad, AgentConfig(max_retries=2))
    assert result.retries == [2] and len(bad.requests) == 3


def test_budget_exceeded_is_fatal():
    class Broke:
        name = "broke"

        def translate(self, request):
            raise BudgetExceeded("cap")

    result = run_episode(gen_coin_env(12), "pddl-edit", Broke())
    assert result.failure_reason == "BudgetExceeded: cap"


def test_action_gen_routing():
    t = Scripted(["move north", "move south", "move east", "move west"])
    env = gen_coin_env(12)
    env.step_cap = 4
    result = run_episode(env, "action-gen", t)
    assert all(r.mode == Mode.ACTION for r in t.requests)
    assert [len(r.history) for r in t.requests] == [0, 1, 2, 3]
    assert result.final_problem == "" and result.steps == 4


def test_oracle_coin_episode():
    result = run_episode(gen_coin_env(12), "pddl-edit", OracleTranslator())
    assert result.success and result.invalid_steps == 0 and result.failure_reason == ""
    assert result.visited_counts == sorted(set(result.visited_counts))
    pf = parse_problem(result.final_problem)
    assert len(pf.facts("at")) == 1


def test_pddl_gen_also_succeeds():
    result = run_episode(gen_coin_env(13), "pddl-gen", OracleTranslator())
    assert result.success and result.invalid_steps == 0


@pytest.mark.parametrize("difficulty", ["easy", "hard"])
def test_oracle_cooking_episode(difficulty):
    result = run_episode(gen_cooking_env(14, difficulty), "pddl-edit", OracleTranslator())
    assert result.success, result.failure_reason


def test_faults_recover_with_retries():
    t = FaultyTranslator(FaultProfile(0.5, ("syntax-error", "undeclared-object", "delete-visited"), seed=3))
    result = run_episode(gen_coin_env(15), "pddl-edit", t)
    assert result.success
    assert result.total_retries == len(t.log) > 0


def test_random_is_seeded():
    a = run_episode(gen_coin_env(16), "random", cfg=AgentConfig(rng_seed="x"))
    b = run_episode(gen_coin_env(16), "random", cfg=AgentConfig(rng_seed="x"))
    assert a.transcript == b.transcript


def test_trace_lines_has_header():
    result = run_episode(gen_coin_env(12), "pddl-edit", OracleTranslator())
    lines = trace_lines(result, {"kind": "header"}).splitlines()
    assert lines[0] == '{"kind": "header"}' and len(lines) == 1 + len(result.trace)
