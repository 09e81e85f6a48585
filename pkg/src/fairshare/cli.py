"""Command-line interface: ``fairshare {gen,shares,solve,verify}``.

Exit codes: 0 success / guarantee met, 1 guarantee violated, 2 input or
valuation-class error, 3 oracle enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from fairshare.aps import solve_half_aps, solve_half_mms
from fairshare.generators import FAMILIES, FAMILY_ALIASES, GeneratorError, GeneratorSpec, gen_random
from fairshare.model import (
    InstanceError,
    allocation_from_dict,
    dumps,
    format_rational,
    load_instance,
    save_instance,
)
from fairshare.shares import OracleCapExceeded, all_shares, exact_aps, exact_mms, exact_wmms
from fairshare.valuations import (
    BinaryAdditive,
    ValuationClassError,
    require_binary_marginals,
    require_kind,
)
from fairshare.verify import GUARANTEES, verify_allocation
from fairshare.wmms import InvalidPartitionError, wmms_allocate_binadd, wmms_round_robin

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
ALGORITHMS = ("aps-half", "mms-half", "wmms-rr", "wmms-binadd")


class CliError(Exception):
    pass


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_table(text: str, output: str | None) -> None:
    # keep stdout clean for JSON when no output file was given
    (sys.stdout if output else sys.stderr).write(text)


def _rational(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {raw!r}") from None


def cmd_gen(args) -> int:
    spec = GeneratorSpec(
        family=args.family,
        n=args.n,
        m=args.m,
        epsilon=args.epsilon,
        delta=args.delta,
        clause_count=args.clauses,
        clause_size=args.clause_size,
        seed=args.seed,
        max_denominator=max(args.max_denominator, args.n),
    )
    instance = gen_random(spec)
    _emit(save_instance(instance).decode("utf-8"), args.output)
    return EXIT_OK


def cmd_shares(args) -> int:
    instance = load_instance(_read(args.instance))
    if args.agent is not None and not 0 <= args.agent < instance.n_agents:
        raise CliError(f"agent {args.agent} out of range 0..{instance.n_agents - 1}")
    notion = args.notion.upper()
    if args.agent is None:
        shares = all_shares(instance, notion)
    else:
        oracle = {"APS": exact_aps, "MMS": exact_mms, "WMMS": exact_wmms}[notion]
        shares = [oracle(instance, args.agent)]
    _emit(dumps([s.to_dict(witness=args.witness) for s in shares]), args.output)
    if args.table:
        lines = [f"{'agent':>5}  {notion}"] + [f"{s.agent:>5}  {format_rational(s.value)}" for s in shares]
        _emit_table("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = load_instance(_read(args.instance))
    if args.algorithm in ("aps-half", "mms-half"):
        require_binary_marginals(instance.valuations, instance.n_goods)
        solver = solve_half_aps if args.algorithm == "aps-half" else solve_half_mms
        result = solver(instance)
    elif args.algorithm == "wmms-rr":
        result = wmms_round_robin(instance)
    else:
        require_kind(instance.valuations, BinaryAdditive)
        result = wmms_allocate_binadd(instance)
    _emit(dumps(result.to_dict()), args.output)
    if args.table:
        lines = ["agent  bundle  value"]
        for i, (bundle, val) in enumerate(zip(result.allocation.bundles, result.achieved)):
            lines.append(f"{i:>5}  {sorted(bundle)}  {format_rational(val)}")
        _emit_table("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = load_instance(_read(args.instance))
    try:
        raw = json.loads(_read(args.allocation).decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.allocation}: invalid JSON: {exc}") from None
    allocation = allocation_from_dict(raw)
    report = verify_allocation(instance, allocation, args.guarantee)
    _emit(dumps(report.to_dict()), args.output)
    if args.table:
        _emit_table(report.table(), args.output)
    return EXIT_OK if report.overall else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairshare", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--family", required=True, choices=sorted(set(FAMILIES) | set(FAMILY_ALIASES)))
    p.add_argument("--n", type=int, required=True, help="number of agents")
    p.add_argument("--m", type=int, help="number of goods (random families)")
    p.add_argument("--epsilon", type=_rational, help="aps-gap epsilon, e.g. 1/10")
    p.add_argument("--delta", type=_rational, help="aps-gap: pick epsilon so APS/WMMS < delta")
    p.add_argument("--clauses", type=int, default=4, help="max clauses per XOS valuation")
    p.add_argument("--clause-size", type=int, help="max goods per clause")
    p.add_argument("--max-denominator", type=int, default=1000, help="entitlement denominator cap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("shares", help="compute exact APS / MMS / WMMS values")
    p.add_argument("instance")
    p.add_argument("--notion", required=True, choices=("aps", "mms", "wmms"))
    p.add_argument("--agent", type=int)
    p.add_argument("--witness", action="store_true", help="include partitions / price vectors")
    p.add_argument("--table", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_shares)

    p = sub.add_parser("solve", help="run an allocation algorithm")
    p.add_argument("instance")
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--table", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check an allocation against a guarantee")
    p.add_argument("instance")
    p.add_argument("allocation", help="allocation JSON or a solve result")
    p.add_argument("--guarantee", required=True, choices=GUARANTEES)
    p.add_argument("--table", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleCapExceeded as exc:
        print(f"fairshare: oracle cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InstanceError, ValuationClassError, GeneratorError, InvalidPartitionError, CliError) as exc:
        print(f"fairshare: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
