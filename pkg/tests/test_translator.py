from __future__ import annotations

import json
import random

import httpx
import pytest

from helpers import TWO_DOOR_DELTA, STEP1_TEXT
from pddlego.agent import run_episode
from pddlego.edit import MalformedDelta, apply_delta, parse_delta_json, visited_violations
from pddlego.envs import StepStatus, gen_coin_env, gen_cooking_env
from pddlego.pddl import Atom, PDDLError, load_domain, parse_problem, print_problem, validate_problem
from pddlego.planner import Unsolvable, ground, solve
from pddlego.translator import (
    API_KEY_ENV,
    BudgetExceeded,
    Cassette,
    FaultProfile,
    FaultyTranslator,
    LLMConfig,
    LLMTranslator,
    Mode,
    ModelRefusal,
    OracleTranslator,
    TranslatorError,
    TranslatorRequest,
    TransportError,
    format_exchange,
    oracle_transport,
    split_transcript,
)
from pddlego.translator.observations import parse_exchange
from pddlego.translator.oracle import pddl_name

TWO_DOOR_OBS = "> You are in the kitchen. To the South you see a closed wooden door. To the East you see a closed glass door.\n"
COIN = load_domain("coin")


def _delta(obs: str, problem: str = STEP1_TEXT, prefix: str = "unk_", domain: str = "coin") -> str:
    req = TranslatorRequest(Mode.DELTA, obs, problem=problem, domain=domain)
    return OracleTranslator(prefix).translate(req).text


def test_two_door_delta_from_oracle():
    assert json.loads(_delta(TWO_DOOR_OBS, prefix="loc")) == json.loads(TWO_DOOR_DELTA)


def test_default_prefix():
    d = json.loads(_delta(TWO_DOOR_OBS))
    assert d["objects"]["add"] == ["unk_1 - location", "unk_2 - location"]


def test_known_room_gives_empty_delta():
    step2 = print_problem(apply_delta(parse_problem(STEP1_TEXT), parse_delta_json(TWO_DOOR_DELTA)))
    d = parse_delta_json(_delta("< look around\n" + TWO_DOOR_OBS, problem=step2, prefix="loc"))
    assert d.is_empty()


def test_entering_renames_placeholder():
    step2 = print_problem(apply_delta(parse_problem(STEP1_TEXT), parse_delta_json(TWO_DOOR_DELTA)))
    obs = (
        "< open door to south\n> You open the wooden door, revealing the corridor.\n"
        "< move south\n> You are in the corridor.\nThrough an open wooden door, to the North you see the kitchen.\n"
    )
    d = parse_delta_json(_delta(obs, problem=step2, prefix="loc"))
    assert d.objects.replace == (("loc1 - location", "corridor - location"),)
    after = apply_delta(parse_problem(step2), d)
    assert after.facts("at") == [Atom("at", ("corridor",))]
    assert Atom("visited", ("corridor",)) in after.init
    assert Atom("visited", ("kitchen",)) in after.init
    assert Atom("connected", ("corridor", "kitchen", "north")) in after.init
    assert Atom("closed_door", ("kitchen", "corridor")) not in after.init
    assert visited_violations(d) == []


def test_init_mode_returns_problem():
    req = TranslatorRequest(Mode.INIT, TWO_DOOR_OBS)
    pf = parse_problem(OracleTranslator("loc").translate(req).text)
    assert validate_problem(pf, COIN) == []
    assert Atom("closed_door", ("kitchen", "loc2")) in pf.init


def test_request_guards():
    with pytest.raises(ValueError):
        TranslatorRequest(Mode.DELTA, TWO_DOOR_OBS)
    with pytest.raises(ValueError):
        TranslatorRequest(Mode.ACTION, TWO_DOOR_OBS)


def test_split_transcript():
    log = format_exchange(None, "You are here.\nMore.") + format_exchange("move north", "Elsewhere.")
    assert split_transcript(log) == [(None, "You are here.\nMore."), ("move north", "Elsewhere.")]


def test_unrecognized_text():
    with pytest.raises(TranslatorError):
        parse_exchange("move north", "A dragon appears.")


def _random_walk(env, rng: random.Random, steps: int):
    log = [format_exchange(None, env.observe().text)]
    for _ in range(steps):
        if env.terminal != "ongoing":
            break
        command = rng.choice(env.observe().valid_actions)
        obs, _ = env.step(command)
        log.append(format_exchange(command, obs.text))
    return log


@pytest.mark.parametrize("kind", ["coin", "easy", "hard"])
def test_oracle_totality_and_soundness(kind):
    oracle = OracleTranslator()
    domain = load_domain("coin" if kind == "coin" else "cooking")
    for seed in range(40):
        env = gen_coin_env(seed) if kind == "coin" else gen_cooking_env(seed, kind)
        rng = random.Random(seed)
        log = _random_walk(env, rng, 30)
        dname = "coin" if kind == "coin" else "cooking"
        pf = parse_problem(oracle.translate(TranslatorRequest(Mode.INIT, log[0], domain=dname)).text)
        i = 1
        while i < len(log):
            chunk = "".join(log[i : i + rng.randint(1, 3)])
            i += chunk.count("< ")
            d = parse_delta_json(_delta(chunk, print_problem(pf), domain=dname))
            assert visited_violations(d) == []
            pf = apply_delta(pf, d)
            assert validate_problem(pf, domain) == []
            assert len(pf.facts("at")) == 1


@pytest.mark.parametrize("seed", range(10, 20))
def test_oracle_map_matches_generator(seed):
    env = gen_coin_env(seed)
    result = run_episode(env, "pddl-edit", OracleTranslator())
    pf = parse_problem(result.final_problem)
    visited = {a.args[0] for a in pf.facts("visited")}
    names = {pddl_name(r): r for r in env.graph.rooms}
    assert visited <= set(names)
    learned = {a.args for a in pf.facts("connected") if a.args[0] in visited and a.args[1] in visited}
    truth = {
        (pddl_name(src), pddl_name(e.target), d)
        for (src, d), e in env.graph.edges.items()
        if pddl_name(src) in visited and pddl_name(e.target) in visited
    }
    assert learned <= truth
    for a, b, d in learned:
        assert env.graph.edges[(names[a], d)].target == names[b]


def test_choose_action_prefers_terminal_then_untried():
    oracle = OracleTranslator()
    req = TranslatorRequest(Mode.ACTION, "> x\n", history=("< move north\n> y\n",), valid_actions=("move north", "move south"))
    assert oracle.translate(req).text == "move south"
    req = TranslatorRequest(Mode.ACTION, "> x\n", valid_actions=("move north", "take coin"))
    assert oracle.translate(req).text == "take coin"


# -- faulty ---------------------------------------------------------------


def test_fault_profile_validation():
    with pytest.raises(ValueError):
        FaultProfile(1.5)
    with pytest.raises(ValueError):
        FaultProfile(0.5, ("gremlins",))


def test_probability_zero_matches_oracle():
    a = run_episode(gen_coin_env(21), "pddl-edit", OracleTranslator())
    faulty = FaultyTranslator(FaultProfile(0.0, ("syntax-error", "drop-fact"), seed=3))
    b = run_episode(gen_coin_env(21), "pddl-edit", faulty)
    assert a.transcript == b.transcript and a.final_problem == b.final_problem
    assert faulty.log == []


def test_syntax_error_breaks_delta():
    step2 = print_problem(apply_delta(parse_problem(STEP1_TEXT), parse_delta_json(TWO_DOOR_DELTA)))
    t = FaultyTranslator(FaultProfile(1.0, ("syntax-error",), seed=1))
    req = TranslatorRequest(Mode.DELTA, "< look around\n" + TWO_DOOR_OBS, problem=step2)
    with pytest.raises(MalformedDelta):
        parse_delta_json(t.translate(req).text)
    assert [c.kind for c in t.log] == ["syntax-error"]
    init = TranslatorRequest(Mode.INIT, TWO_DOOR_OBS)
    with pytest.raises(PDDLError):
        parse_problem(t.translate(init).text)


def test_drop_fact_makes_frontier_unplannable():
    t = FaultyTranslator(FaultProfile(1.0, ("drop-fact",), seed=0), inner=OracleTranslator("loc"))
    delta = parse_delta_json(t.translate(TranslatorRequest(Mode.DELTA, TWO_DOOR_OBS, problem=STEP1_TEXT)).text)
    dropped = t.log[0].detail
    assert dropped.startswith("(connected kitchen ")
    pf = apply_delta(parse_problem(STEP1_TEXT), delta)
    lost = dropped.split()[2]
    with pytest.raises(Unsolvable):
        solve(ground(COIN, pf.replace(goal=Atom("at", (lost,)))))


def test_undeclared_and_delete_visited_kinds():
    step_obs = "< look around\n" + TWO_DOOR_OBS
    step2 = print_problem(apply_delta(parse_problem(STEP1_TEXT), parse_delta_json(TWO_DOOR_DELTA)))
    t = FaultyTranslator(FaultProfile(1.0, ("undeclared-object",), seed=0))
    pf = apply_delta(parse_problem(step2), parse_delta_json(t.translate(TranslatorRequest(Mode.DELTA, step_obs, problem=step2)).text))
    assert [d.kind.value for d in validate_problem(pf, COIN)] == ["UndeclaredObject"]
    t = FaultyTranslator(FaultProfile(1.0, ("delete-visited",), seed=0))
    d = parse_delta_json(t.translate(TranslatorRequest(Mode.DELTA, step_obs, problem=step2)).text)
    assert visited_violations(d) == ["(visited kitchen)"]


def test_faulty_is_seeded():
    def run(seed):
        t = FaultyTranslator(FaultProfile(0.5, ("drop-fact", "syntax-error"), seed=seed))
        run_episode(gen_coin_env(30), "pddl-edit", t)
        return [(c.call, c.kind, c.detail) for c in t.log]

    assert run("a") == run("a")


# -- llm client -----------------------------------------------------------


def _completion(content, status=200, refusal=None):
    def handler(request: httpx.Request) -> httpx.Response:
        msg = {"role": "assistant", "content": content}
        if refusal:
            msg["refusal"] = refusal
        return httpx.Response(status, json={"choices": [{"message": msg}], "usage": {"total_tokens": 10}})

    return httpx.MockTransport(handler)


def test_missing_key_fails_before_network(monkeypatch):
    monkeypatch.delenv(API_KEY_ENV, raising=False)
    with pytest.raises(TranslatorError, match=API_KEY_ENV):
        LLMTranslator(LLMConfig(endpoint="http://127.0.0.1:9")).translate(TranslatorRequest(Mode.INIT, TWO_DOOR_OBS))


def test_request_shape(monkeypatch):
    monkeypatch.setenv(API_KEY_ENV, "sk-test")
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers["authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "```json\n{}\n```"}}]})

    t = LLMTranslator(LLMConfig(endpoint="http://model.local/v1/", model="m", temperature=1.0), transport=httpx.MockTransport(handler))
    resp = t.translate(TranslatorRequest(Mode.DELTA, TWO_DOOR_OBS, problem=STEP1_TEXT))
    assert resp.text == "{}" and resp.mode == Mode.DELTA
    assert seen["url"] == "http://model.local/v1/chat/completions"
    assert seen["auth"] == "Bearer sk-test"
    body = seen["body"]
    assert body["model"] == "m" and body["temperature"] == 1.0
    assert body["response_format"] == {"type": "json_object"}
    assert "(define (domain environment)" in body["messages"][0]["content"]
    assert "Previous problem file:" in body["messages"][1]["content"]


def test_budget_exceeded():
    t = LLMTranslator(LLMConfig(max_requests=1), transport=_completion("(define (problem p))"))
    req = TranslatorRequest(Mode.INIT, TWO_DOOR_OBS)
    t.translate(req)
    with pytest.raises(BudgetExceeded):
        t.translate(req)
    t = LLMTranslator(LLMConfig(max_tokens=5), transport=_completion("(define (problem p))"))
    t.translate(req)
    with pytest.raises(BudgetExceeded):
        t.translate(req)


@pytest.mark.parametrize(
    "transport, error",
    [
        (_completion("I'm sorry, I cannot help with that."), ModelRefusal),
        (_completion(None, refusal="no"), ModelRefusal),
        (_completion("x", status=429), TransportError),
        (_completion("x", status=503), TransportError),
        (_completion("x", status=400), TranslatorError),
    ],
)
def test_error_mapping(transport, error):
    with pytest.raises(error):
        LLMTranslator(transport=transport).translate(TranslatorRequest(Mode.INIT, TWO_DOOR_OBS))


def test_action_extraction():
    t = LLMTranslator(transport=_completion("Move North.\nBecause the door is open."))
    req = TranslatorRequest(Mode.ACTION, TWO_DOOR_OBS, valid_actions=("move north", "move south"))
    assert t.translate(req).text == "move north"


def test_mock_transport_matches_oracle():
    llm = LLMTranslator(transport=oracle_transport())
    a = run_episode(gen_cooking_env(12, "easy"), "pddl-edit", llm)
    b = run_episode(gen_cooking_env(12, "easy"), "pddl-edit", OracleTranslator())
    assert a.success and a.transcript == b.transcript


def test_cassette_record_then_replay(tmp_path, monkeypatch):
    monkeypatch.delenv(API_KEY_ENV, raising=False)
    path = tmp_path / "tape.jsonl"
    rec = run_episode(gen_coin_env(12), "pddl-edit", LLMTranslator(cassette=Cassette(path, "record"), transport=oracle_transport()))
    lines = path.read_text().splitlines()
    assert lines and all(set(json.loads(ln)) == {"request_hash", "response_text"} for ln in lines)
    play = run_episode(gen_coin_env(12), "pddl-edit", LLMTranslator(cassette=Cassette(path, "replay")))
    assert play.transcript == rec.transcript and play.final_problem == rec.final_problem


def test_cassette_miss_is_transport_error(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with pytest.raises(TransportError):
        LLMTranslator(cassette=Cassette(path)).translate(TranslatorRequest(Mode.INIT, TWO_DOOR_OBS))
    with pytest.raises(ValueError):
        Cassette(path, "rewind")
