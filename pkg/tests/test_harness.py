from __future__ import annotations

import csv
import io
import json

import pytest

from helpers import HERE
from pddlego.harness import cli
from pddlego.harness.config import ConfigError, SuiteConfig, load_config, parse_seeds
from pddlego.harness.suite import (
    CSV_FIELDS,
    IncomparableSuites,
    compare,
    run_suite,
    sample_std,
)

FIXTURES = HERE.parent / "src" / "pddlego" / "fixtures"


def test_parse_seeds():
    assert parse_seeds("10..59") == tuple(range(10, 60))
    assert parse_seeds("1, 3, 5..7") == (1, 3, 5, 6, 7)
    assert parse_seeds([4, 2]) == (4, 2)
    for bad in ("9..1", "x", "1..", ""):
        with pytest.raises(ConfigError):
            SuiteConfig(seeds=bad)


@pytest.mark.parametrize(
    "overrides",
    [
        {"trials": 0},
        {"env": "chess"},
        {"strategy": "telepathy"},
        {"translator": "none"},
        {"fault_probability": 2.0},
        {"fault_kinds": ("gremlins",)},
        {"parallel": 0},
        {"seeds": "1,1"},
    ],
)
def test_config_guards(overrides):
    with pytest.raises(ConfigError):
        SuiteConfig(**overrides)


def test_load_config_files(tmp_path):
    toml = tmp_path / "suite.toml"
    toml.write_text('env = "cooking"\ndifficulty = "hard"\nseeds = "0..2"\nfault-probability = 0.1\n')
    cfg = load_config(toml, trials=3)
    assert cfg.env == "cooking" and cfg.seeds == (0, 1, 2) and cfg.trials == 3 and cfg.fault_probability == 0.1
    js = tmp_path / "suite.json"
    js.write_text(json.dumps({"seeds": [5], "strategy": "random", "translator": "none"}))
    assert load_config(js).translator_label == "none"
    js.write_text("{broken")
    with pytest.raises(ConfigError):
        load_config(js)
    with pytest.raises(ConfigError):
        load_config(None, bogus=1)


def test_sample_std():
    assert sample_std([]) == (0.0, True)
    assert sample_std([4]) == (0.0, True)
    assert sample_std([2, 4, 4, 4, 5, 5, 7, 9])[0] == pytest.approx(2.13809, abs=1e-5)


def test_suite_outputs(tmp_path):
    cfg = SuiteConfig(seeds="10..12", trials=2, out=str(tmp_path / "out"))
    run = run_suite(cfg)
    rows = list(csv.DictReader(io.StringIO(run.csv_text)))
    assert tuple(rows[0]) == CSV_FIELDS
    assert len(run.csv_text.splitlines()) == 3 * 2 + 1
    assert run.metrics.success_rate == 1.0
    out = tmp_path / "out"
    assert (out / "summary.csv").read_text() == run.csv_text
    summary = json.loads((out / "summary.json").read_text())
    assert summary["episodes"] == 6 and summary["std_undefined"] is False
    assert len(list((out / "traces").glob("*.jsonl"))) == 6
    assert json.loads((out / "config.json").read_text())["seeds"] == [10, 11, 12]


def test_single_episode_flags_undefined_std():
    m = run_suite(SuiteConfig(seeds="10")).metrics
    assert m.std_steps == 0.0 and m.std_undefined
    assert m.seed(10).std_undefined


def test_transport_failures_do_not_abort(tmp_path, monkeypatch):
    monkeypatch.delenv("PDDLEGO_API_KEY", raising=False)
    cfg = SuiteConfig(seeds="10..11", translator="llm", endpoint="http://127.0.0.1:9")
    run = run_suite(cfg)
    assert run.metrics.success_rate == 0.0
    assert all(r["failure_reason"] for r in run.metrics.rows)


def test_compare():
    a = run_suite(SuiteConfig(seeds="10..14")).metrics
    b = run_suite(SuiteConfig(seeds="10..14", strategy="random", translator="none", trials=3)).metrics
    assert compare(a, a).gain == 0.0
    ab, ba = compare(a, b), compare(b, a)
    assert ab.gain > 0 > ba.gain
    assert ab.common_seeds == ba.common_seeds
    assert "relative efficiency gain" in ab.render()
    other = run_suite(SuiteConfig(seeds="20..21")).metrics
    with pytest.raises(IncomparableSuites):
        compare(a, other)


def _main(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_solve(capsys):
    code, out, _ = _main(capsys, "solve", str(FIXTURES / "coin-domain.pddl"), str(HERE / "pf1.pddl"))
    assert code == 0
    assert out == "(open_door kitchen loc1)\n(move kitchen loc1 south)\n"


def test_cli_solve_no_plan(capsys, tmp_path):
    pf = tmp_path / "p.pddl"
    pf.write_text((HERE / "pf1.pddl").read_text().replace("(:goal (at loc1))", "(:goal (visited loc1))"))
    code, _, err = _main(capsys, "solve", str(FIXTURES / "coin-domain.pddl"), str(pf))
    assert code == 1 and "no plan" in err


def test_cli_validate(capsys, tmp_path):
    code, out, _ = _main(capsys, "validate", str(FIXTURES / "coin-domain.pddl"), str(HERE / "pf1.pddl"))
    assert code == 0 and out.strip() == "ok"
    pf = tmp_path / "p.pddl"
    pf.write_text((HERE / "pf1.pddl").read_text().replace("(at kitchen)", "(at loc9)"))
    code, out, _ = _main(capsys, "validate", str(FIXTURES / "coin-domain.pddl"), str(pf))
    assert code == 1 and out.startswith("UndeclaredObject")


def test_cli_gen_env_is_deterministic(capsys):
    _, a, _ = _main(capsys, "gen-env", "--env", "cooking", "--difficulty", "hard", "--seed", "0")
    _, b, _ = _main(capsys, "gen-env", "--env", "cooking", "--difficulty", "hard", "--seed", "0")
    assert a == b and json.loads(a)["kind"] == "cooking"


def test_cli_run(capsys, tmp_path):
    out = tmp_path / "run"
    code, text, _ = _main(
        capsys, "run", "--env", "coin", "--seeds", "10..12", "--strategy", "pddl-edit", "--translator", "oracle", "--out", str(out)
    )
    assert code == 0 and "success=100%" in text
    assert len((out / "summary.csv").read_text().splitlines()) == 4


def test_cli_episode_and_replay(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    code, text, _ = _main(capsys, "episode", "--env", "coin", "--seed", "12", "--trace", str(trace))
    assert code == 0 and text.rstrip().splitlines()[-1].startswith("success:")
    transcript = text[: text.rindex("success:")]
    code, replayed, _ = _main(capsys, "replay", str(trace))
    assert code == 0 and replayed == transcript
    code, shown, _ = _main(capsys, "episode", "--env", "coin", "--seed", "12", "--show")
    assert "--- iteration 1" in shown and "goal: explore" in shown


def test_cli_replay_requires_header(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"iteration": 1}\n')
    code, _, err = _main(capsys, "replay", str(bad))
    assert code == 2 and "header" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--seeds", "5..1"],
        ["run", "--trials", "0", "--seeds", "1"],
        ["solve", "missing.pddl", "also-missing.pddl"],
        ["run", "--config", "nowhere.toml"],
    ],
)
def test_cli_bad_input_exits_nonzero(capsys, argv):
    code, _, err = _main(capsys, *argv)
    assert code == 2 and err.startswith("pddlego ")


@pytest.mark.parametrize("argv", [[], ["run", "--env", "chess"], ["frobnicate"], ["gen-env", "--seed", "x", "--env", "coin"]])
def test_cli_bad_flags_exit_nonzero(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code != 0


def test_module_entry_point():
    import subprocess
    import sys

    root = HERE.parent
    proc = subprocess.run(
        [sys.executable, "-m", "pddlego", "solve", "fixtures/coin-domain.pddl", "tests/pf1.pddl"],
        cwd=root,
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines() == ["(open_door kitchen loc1)", "(move kitchen loc1 south)"]
