"""Command line entry point.

    ecash demo      [--profile P] [--seed N] [--compact] [--offline]
    ecash scenario  --scenario PATH|NAME [--report PATH] [--log PATH]
    ecash bench     [--profile P] [--seed N] [-k K] [--report PATH]
    ecash keygen    [--profile P] [--seed N] [--report PATH]
    ecash stress    [--profile P] [--seed N] [--clients N]

Exit codes: 0 pass, 1 assertion/verdict failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time
from pathlib import Path

from . import wire
from .atm import AtmConfig, init_atm
from .bank import BankConfig, init_bank
from .errors import EcashError, ScriptError
from .harness import bundled_scenarios, run, run_stress
from .harness.runner import Scenario
from .offline import build_filter
from .params import get_profile
from .wallet import MerchantView, init_user

BENCH_SCHEMA = "ecash-bench/1"
SIZE_BOUNDS = {"coin": 2048, "voucher": 60 * 1024, "transaction": 4096}


class UsageError(Exception):
    pass


def _rng(seed):
    return random.Random(seed) if seed is not None else None


def _bank_config(args) -> BankConfig:
    return BankConfig(opening_balance=args.opening_balance, mint_cap=args.mint_cap)


def _write_report(path, data: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _setup(args):
    params = get_profile(args.profile)
    rng = _rng(args.seed)
    bank = init_bank(params, _bank_config(args), rng)
    atm = init_atm(bank, AtmConfig(offline=args.offline, flush_interval=args.flush_interval), rng)
    user = init_user(bank, rng)
    merchant = MerchantView(init_user(bank, rng))
    if args.offline:
        atm.install_filter(build_filter([], args.epsilon, 1000, epoch=1))
    return bank, atm, user, merchant


def cmd_demo(args) -> int:
    bank, atm, user, merchant = _setup(args)
    if args.compact:
        atm.req_coin_compact(2)
    else:
        atm.req_coin(2)
    print(f"profile={args.profile} compact={args.compact} offline={args.offline}")
    print(f"stocked {len(atm.ks)} coins at the ATM")
    entry = user.withdraw(atm, compact=args.compact)
    if args.offline:
        print(f"offline flush -> update_bal {atm.flush()}")
    print(f"withdrawal done; user balance {bank.balance(user.pk)}")
    r_v = merchant.new_session()
    C, V, T = user.spend(entry, merchant.pk_m, r_v)
    sizes = {"coin": len(wire.encode(C)), "voucher": len(wire.encode(V)), "transaction": len(wire.encode(T))}
    for name, size in sizes.items():
        print(f"{name:<12} {size:>6} bytes (bound {SIZE_BOUNDS[name]})")
    verdict, result = merchant.accept(C, V, T, r_v)
    print(f"merchant verify_tx: {'accept' if verdict else 'reject: ' + verdict.reason}")
    print(f"bank update_tx: {result}")
    ok = bool(verdict) and result == 0
    if not args.compact:
        ok = ok and all(sizes[k] <= SIZE_BOUNDS[k] for k in sizes)
    _write_report(args.report, {"sizes": sizes, "accepted": bool(verdict), "update_tx": str(result), "passed": ok})
    return 0 if ok else 1


def _resolve_scenario(ref: str) -> Path:
    path = Path(ref)
    if path.exists():
        return path
    bundled = bundled_scenarios()
    if ref in bundled:
        return bundled[ref]
    raise UsageError(f"no scenario file or bundled scenario named {ref!r} (bundled: {', '.join(bundled)})")


def cmd_scenario(args) -> int:
    ref = args.scenario or args.path
    if not ref:
        raise UsageError("scenario requires --scenario PATH or a bundled name")
    sc = Scenario.load(_resolve_scenario(ref))
    if args.seed is not None:
        sc.seed = args.seed
    if args.profile_set:
        sc.profile = args.profile
    sc.compact = sc.compact or args.compact
    sc.offline = sc.offline or args.offline
    result = run(sc)
    for v in result.verdicts:
        where = f" (event {v.event})" if v.event is not None else ""
        print(f"{'PASS' if v.passed else 'FAIL'}  {v.name}{where}  {v.detail}")
    print(f"{sc.name}: {'passed' if result.passed else 'FAILED'} ({len(result.log)} messages)")
    _write_report(args.report, result.report())
    if args.log:
        result.log.export(args.log)
    return 0 if result.passed else 1


def _median_ms(samples) -> float:
    return round(statistics.median(samples) * 1000, 3)


def cmd_bench(args) -> int:
    bank, atm, user, merchant = _setup(args)
    k = args.k
    atm.req_coin(k + 1)
    t_user, t_atm, t_spend, t_verify = [], [], [], []
    sizes = {}
    for _ in range(k):
        t0 = time.perf_counter()
        w = user.start_withdrawal()
        t1 = time.perf_counter()
        promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
        t2 = time.perf_counter()
        receipt = user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
        t3 = time.perf_counter()
        coin = atm.complete_issue(promise.nonce, receipt)
        t4 = time.perf_counter()
        entry = user.receive_coin(w, coin)
        t5 = time.perf_counter()
        t_user.append((t1 - t0) + (t3 - t2) + (t5 - t4))
        t_atm.append((t2 - t1) + (t4 - t3))
        r_v = merchant.new_session()
        t0 = time.perf_counter()
        C, V, T = user.spend(entry, merchant.pk_m, r_v)
        t1 = time.perf_counter()
        verdict = merchant.verify_tx(C, V, T, r_v)
        t2 = time.perf_counter()
        if not verdict:
            print(f"verify_tx rejected: {verdict.reason}", file=sys.stderr)
            return 1
        t_spend.append(t1 - t0)
        t_verify.append(t2 - t1)
        sizes = {"coin": len(wire.encode(C)), "voucher": len(wire.encode(V)), "transaction": len(wire.encode(T))}
    report = {
        "schema": BENCH_SCHEMA,
        "schema_version": 1,
        "profile": args.profile,
        "seed": args.seed,
        "repetitions": k,
        "workers": 1,
        "timings_ms": {
            "withdraw_user": _median_ms(t_user),
            "issue_voucher_atm": _median_ms(t_atm),
            "spend_coin": _median_ms(t_spend),
            "verify_tx": _median_ms(t_verify),
        },
        "sizes_bytes": sizes,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    _write_report(args.report, report)
    return 0


def cmd_keygen(args) -> int:
    if args.profile == "toy":
        raise UsageError("the toy profile is test-only; refusing to generate keys with it")
    bank = init_bank(get_profile(args.profile), _bank_config(args), _rng(args.seed))
    pub = bank.public
    out = {
        "profile": args.profile,
        "blind_rsa_n": hex(pub.blind_pk.n),
        "blind_rsa_e": pub.blind_pk.e,
        "user_cred_W": pub.user_cred.to_bytes().hex(),
        "atm_cred_W": pub.atm_cred.to_bytes().hex(),
        "coin_cred_W": pub.coin_cred.to_bytes().hex(),
        "compact_n": pub.compact_n,
    }
    print(json.dumps(out, indent=2))
    _write_report(args.report, out)
    return 0


def cmd_stress(args) -> int:
    verdicts = run_stress(args.profile, args.seed or 0, args.clients)
    for v in verdicts:
        print(f"{'PASS' if v.passed else 'FAIL'}  {v.name}  {v.detail}")
    return 0 if all(v.passed for v in verdicts) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", choices=["production", "toy"], default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--compact", action="store_true")
    common.add_argument("--offline", action="store_true")
    common.add_argument("--report", metavar="PATH")
    common.add_argument("--epsilon", type=float, default=1e-3)
    common.add_argument("--mint-cap", type=int, default=10_000)
    common.add_argument("--opening-balance", type=int, default=100)
    common.add_argument("--flush-interval", type=int, default=300)

    parser = argparse.ArgumentParser(prog="ecash", description="Multi-issuer offline e-cash")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("demo", parents=[common], help="run the honest end-to-end flow").set_defaults(fn=cmd_demo)
    sc = sub.add_parser("scenario", parents=[common], help="run a scenario script")
    sc.add_argument("path", nargs="?")
    sc.add_argument("--scenario", metavar="PATH")
    sc.add_argument("--log", metavar="PATH", help="export the event log as NDJSON")
    sc.set_defaults(fn=cmd_scenario)
    bench = sub.add_parser("bench", parents=[common], help="time the four protocol steps")
    bench.add_argument("-k", type=int, default=9, help="repetitions (median reported)")
    bench.set_defaults(fn=cmd_bench)
    sub.add_parser("keygen", parents=[common], help="generate bank keys and print the public part").set_defaults(fn=cmd_keygen)
    stress = sub.add_parser("stress", parents=[common], help="concurrent clients against one bank")
    stress.add_argument("--clients", type=int, default=8)
    stress.set_defaults(fn=cmd_stress)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.profile_set = args.profile is not None
    if args.profile is None:
        args.profile = "production" if args.command in ("demo", "bench", "keygen") else "toy"
    if not 0 < args.epsilon < 1:
        parser.error("--epsilon must lie in (0, 1)")
    if args.command == "bench" and args.k < 1:
        parser.error("-k must be positive")
    try:
        return args.fn(args)
    except (UsageError, ScriptError) as exc:
        print(f"ecash: {exc}", file=sys.stderr)
        return 2
    except EcashError as exc:
        print(f"ecash: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
