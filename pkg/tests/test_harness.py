import json

import pytest

from ecash.errors import ScriptError
from ecash.harness import Scenario, bundled_scenarios, run, run_file, run_stress


@pytest.mark.parametrize("name", sorted(bundled_scenarios()))
def test_bundled_scenarios_pass(name):
    result = run_file(bundled_scenarios()[name])
    assert result.passed, result.failures()


def test_seed_replay_is_byte_identical():
    path = bundled_scenarios()["double_spend"]
    a, b = run_file(path), run_file(path)
    assert a.log.to_ndjson() == b.log.to_ndjson()
    assert a.outcomes == b.outcomes


def test_different_seed_changes_log():
    sc = Scenario.load(bundled_scenarios()["honest"])
    first = run(sc).log.to_ndjson()
    sc.seed += 1
    assert run(sc).log.to_ndjson() != first


def _scenario(events, **roster):
    base = {"atms": 1, "users": 2, "merchants": 1}
    base.update(roster)
    return Scenario.from_dict({"name": "t", "seed": 5, "roster": base, "events": events})


def test_false_abort_then_spend_names_user():
    sc = _scenario(
        [
            {"op": "stock", "atm": 0, "n": 1},
            {"op": "false_abort", "user": 1, "atm": 0, "as": "c"},
            {"op": "spend", "coin": "c", "expect": "user:1"},
        ],
        dishonest_users=1,
    )
    assert run(sc).passed


def test_withhold_then_reissue_names_atm():
    sc = _scenario(
        [
            {"op": "stock", "atm": 0, "n": 1},
            {"op": "withhold_coin", "atm": 0, "user": 0, "as": "k"},
            {"op": "reissue", "atm": 0, "coin": "k", "user": 1, "as": "r"},
            {"op": "spend", "coin": "r", "expect": "atm:0"},
        ],
        dishonest_atms=1,
    )
    assert run(sc).passed


def test_wrong_expectation_fails():
    sc = _scenario([{"op": "stock", "atm": 0, "n": 1}, {"op": "withdraw", "user": 0, "atm": 0, "as": "c"},
                    {"op": "spend", "coin": "c", "expect": "user:0"}])
    assert not run(sc).passed


def test_bad_script(tmp_path):
    with pytest.raises(ScriptError):
        Scenario.from_dict({"events": [{"op": "explode"}]})
    with pytest.raises(ScriptError):
        Scenario.from_dict({"roster": {"nope": 1}, "events": []})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScriptError):
        Scenario.load(bad)


def test_report_is_json_serialisable():
    result = run_file(bundled_scenarios()["honest"])
    assert json.loads(json.dumps(result.report()))["passed"] is True


def test_stress():
    verdicts = run_stress("toy", 0, 8)
    assert verdicts and all(v.passed for v in verdicts), [v for v in verdicts if not v.passed]
