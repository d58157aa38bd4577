import json

from ecash.cli import BENCH_SCHEMA, main


def test_demo_toy(capsys):
    assert main(["demo", "--profile", "toy", "--seed", "1"]) == 0
    assert "merchant verify_tx: accept" in capsys.readouterr().out


def test_demo_compact_offline():
    assert main(["demo", "--profile", "toy", "--seed", "2", "--compact", "--offline"]) == 0


def test_scenario_bundled(tmp_path):
    log = tmp_path / "log.ndjson"
    assert main(["scenario", "double_spend", "--log", str(log)]) == 0
    lines = log.read_text().splitlines()
    assert lines and all(json.loads(line) for line in lines)


def test_scenario_unknown(capsys):
    assert main(["scenario", "--scenario", "no_such_thing"]) == 2
    assert "no scenario" in capsys.readouterr().err


def test_keygen_refuses_toy():
    assert main(["keygen", "--profile", "toy"]) == 2


def test_bad_epsilon_is_usage_error():
    try:
        main(["demo", "--epsilon", "2"])
    except SystemExit as exc:
        assert exc.code == 2
    else:
        raise AssertionError("expected SystemExit")


def test_bench_report(tmp_path):
    reports = []
    for i in range(2):
        path = tmp_path / f"b{i}.json"
        assert main(["bench", "--profile", "toy", "--seed", "3", "-k", "2", "--report", str(path)]) == 0
        reports.append(json.loads(path.read_text()))
    r = reports[0]
    assert r["schema"] == BENCH_SCHEMA and r["schema_version"] == 1
    assert set(r["timings_ms"]) == {"withdraw_user", "issue_voucher_atm", "spend_coin", "verify_tx"}
    assert set(r["sizes_bytes"]) == {"coin", "voucher", "transaction"}
    assert reports[0]["sizes_bytes"] == reports[1]["sizes_bytes"]
