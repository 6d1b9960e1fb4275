"""Command-line entry point: simulate, price, census, verify, excursions.

Outputs are machine-readable (CSV or JSON lines), deterministic for a
given configuration, and carry exact rationals as "num/den" strings in
exact mode so reports can be diffed against golden files.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import pricing, verify
from .game import GameTrace, NumericMode, fmt_number, run_game
from .reality import parse_reality
from .stopping import event_report, excursions
from .strategies import parse_strategy


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faircoin",
        description="Fair-coin betting game: simulation, pricing, verification.")
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("simulate", help="play one game and emit the trace")
    p.add_argument("--strategy", required=True, help="e.g. mulc:c=1/2, stopadd:eps=2/4")
    p.add_argument("--reality", required=True,
                   help="e.g. fixed:+1-1, iid:seed=42, alt, greedy, minimax:depth=12")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "float64"], default="exact")
    p.add_argument("--initial", default="1", help="initial capital, rational")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--output", default="-", help="trace destination, '-' for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("price", help="bracket the boundary ticket's upper price")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--series", action="store_true",
                   help="emit the bracket at every horizon up to --horizon")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("census", help="absorbed-negative situation counts")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="run an identity check exhaustively")
    p.add_argument("--check", required=True, choices=sorted(verify.CHECKS))
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--c", default=None, help="contrarian fraction, rational")
    p.add_argument("--eps", default=None, help="additive stake slope, rational")
    p.add_argument("--N", type=int, default=None, help="one-sided level")
    p.add_argument("--direction", choices=["down", "up"], default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("excursions", help="origin-departure / boundary-hit schedule")
    p.add_argument("--path", help="explicit move string, e.g. +1-1-1 or +--")
    p.add_argument("--reality", help="reality spec to generate the path instead")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_excursions)

    return parser


def _open_out(dest: str):
    return sys.stdout if dest == "-" else open(dest, "w")


def cmd_simulate(args) -> int:
    mode = NumericMode(args.mode)
    exact = mode is NumericMode.EXACT
    strategy = parse_strategy(args.strategy, exact=exact)
    reality = parse_reality(
        args.reality,
        strategy_factory=lambda: parse_strategy(args.strategy, exact=exact),
        horizon=args.horizon)
    initial = Fraction(args.initial) if exact else float(Fraction(args.initial))
    trace = run_game(strategy, reality, args.horizon, initial_capital=initial, mode=mode)
    out = _open_out(args.output)
    try:
        if args.format == "csv":
            trace.write_csv(out)
        else:
            trace.write_jsonl(out)
        out.write(json.dumps({"event_report": event_report(trace.moves).to_json_dict()}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _bracket_dict(b: pricing.PriceBracket) -> dict:
    return {"l": b.l, "horizon": b.horizon, "lower": fmt_number(b.lower),
            "upper": fmt_number(b.upper), "live_mass": fmt_number(b.live_mass)}


def cmd_price(args) -> int:
    if args.series:
        for b in pricing.bracket_series(args.l, args.horizon):
            print(json.dumps(_bracket_dict(b)))
    else:
        print(json.dumps(_bracket_dict(pricing.upper_price_bracket(args.l, args.horizon))))
    return 0


def cmd_census(args) -> int:
    census = pricing.enumerate_absorption(args.l, args.k)
    print(json.dumps({
        "l": census.l,
        "k": census.k,
        "a": list(census.a),
        "b_k": census.b_k,
        "sum_ai_2^-i": fmt_number(census.budget_sum),
    }))
    return 0


def cmd_verify(args) -> int:
    params = {}
    if args.c is not None:
        params["c"] = Fraction(args.c)
    if args.eps is not None:
        params["eps"] = Fraction(args.eps)
    if args.N is not None:
        params["N"] = args.N
    if args.direction is not None:
        params["direction"] = args.direction
    report = verify.exhaustive(args.depth, args.check, **params)
    print(json.dumps(report.to_json_dict()))
    return 0 if report.passed else 1


def cmd_excursions(args) -> int:
    if (args.path is None) == (args.reality is None):
        print("excursions: give exactly one of --path / --reality", file=sys.stderr)
        return 2
    if args.path is not None:
        from .game import Situation
        moves = Situation.from_string(args.path).moves
    else:
        if args.horizon is None:
            print("excursions: --reality needs --horizon", file=sys.stderr)
            return 2
        source = parse_reality(args.reality)
        moves = []
        for _ in range(args.horizon):
            moves.append(source.next_move(moves, Fraction(0)))
    schedule = excursions(moves)
    print(json.dumps({
        "rounds": len(moves),
        "excursions": [{"w": p.w, "v": p.v} for p in schedule],
    }))
    return 0


if __name__ == "__main__":
    sys.exit(main())
