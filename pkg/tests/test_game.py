"""Protocol engine: situations, traces, serialization, game execution."""

import io
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from faircoin.game import (
    GameError,
    GameTrace,
    NumericMode,
    Situation,
    check_collateral,
    fmt_number,
    parse_number,
    play_round,
    process_values,
    run_game,
)
from faircoin.reality import Alternating, FixedPath
from faircoin.strategies import MultiplicativeContrarian, ZeroStrategy
from faircoin.verify import product_capital

moves_lists = st.lists(st.sampled_from([-1, 1]), max_size=40)


class ConstantStake:
    def __init__(self, stake):
        self.stake = stake

    def next_stake(self):
        return self.stake

    def observe(self, x):
        pass


def test_play_round_arithmetic():
    t = GameTrace()
    play_round(t, Fraction(1), 1)
    assert t.final_capital == 1
    play_round(t, Fraction(0), -1)
    assert t.final_capital == 1
    t2 = GameTrace()
    play_round(t2, Fraction(1), 1)
    play_round(t2, Fraction(-1, 2), 1)
    assert t2.final_capital == Fraction(1, 2)


def test_play_round_rejects_bad_move():
    with pytest.raises(GameError):
        GameTrace().play(Fraction(1), 0)


def test_process_values_examples():
    pv = process_values([1, 1, -1])
    assert (pv.n, pv.s, pv.xbar) == (3, 1, Fraction(1, 3))
    pv = process_values([])
    assert (pv.n, pv.s, pv.xbar) == (0, 0, Fraction(0))
    pv = process_values([-1, -1])
    assert (pv.n, pv.s, pv.xbar) == (2, -2, Fraction(-1))


@given(moves_lists, st.sampled_from([-1, 1]))
def test_process_values_prefix_consistency(moves, x):
    before = process_values(moves)
    after = process_values(moves + [x])
    assert after.s == before.s + x
    assert after.n == before.n + 1


def test_situation_parsing_and_negation():
    assert Situation.from_string("+1-1+1").moves == (1, -1, 1)
    assert Situation.from_string("+-+").moves == (1, -1, 1)
    assert (-Situation((1, -1))).moves == (-1, 1)
    with pytest.raises(GameError):
        Situation.from_string("+x")


def test_run_game_zero_strategy():
    trace = run_game(ZeroStrategy(), Alternating(), 5)
    assert all(r.capital == 0 for r in trace.rounds)


def test_run_game_constant_stake():
    trace = run_game(ConstantStake(Fraction(1)), FixedPath([1, 1, 1]), 3)
    assert trace.final_capital == 3


def test_run_game_matches_product_formula():
    trace = run_game(MultiplicativeContrarian(Fraction(1, 2)), Alternating(), 4)
    # engine gain is from zero; account wealth 1 + K equals the product
    assert 1 + trace.final_capital == product_capital(trace.moves, Fraction(1, 2))


def test_run_game_negative_horizon():
    with pytest.raises(GameError):
        run_game(ZeroStrategy(), Alternating(), -1)


def test_check_collateral_boundaries():
    t = GameTrace(initial_capital=Fraction(1))
    t.play(Fraction(1), -1)  # K = -1
    assert check_collateral(t)
    t2 = GameTrace(initial_capital=Fraction(1))
    t2.play(Fraction(5, 4), -1)  # K = -5/4
    assert not check_collateral(t2)
    t3 = GameTrace(initial_capital=Fraction(0))
    t3.play(Fraction(1), 1)
    assert check_collateral(t3)


def test_wealth_indexing_and_min():
    t = GameTrace(initial_capital=Fraction(2))
    t.play(Fraction(1), -1)
    t.play(Fraction(1), 1)
    assert t.wealth(0) == 2
    assert t.wealth(1) == 1
    assert t.wealth(2) == 2
    assert t.min_wealth() == 1


@pytest.mark.parametrize("value", [Fraction(3, 7), Fraction(-1, 2), Fraction(0), Fraction(5)])
def test_number_round_trip_exact(value):
    assert parse_number(fmt_number(value)) == value


def test_number_round_trip_float():
    assert parse_number(fmt_number(0.125), NumericMode.FLOAT64) == 0.125


def _example_trace():
    trace = GameTrace(initial_capital=Fraction(1))
    trace.play(Fraction(0), 1)
    trace.play(Fraction(-1, 2), -1)
    trace.play(Fraction(1, 3), 1)
    return trace


def test_csv_round_trip():
    trace = _example_trace()
    buf = io.StringIO()
    trace.write_csv(buf)
    buf.seek(0)
    back = GameTrace.read_csv(buf)
    assert back.rounds == trace.rounds


def test_jsonl_round_trip():
    trace = _example_trace()
    buf = io.StringIO()
    trace.write_jsonl(buf)
    buf.seek(0)
    back = GameTrace.read_jsonl(buf)
    assert back.rounds == trace.rounds


def test_csv_rejects_bad_header():
    with pytest.raises(GameError):
        GameTrace.read_csv(io.StringIO("a,b,c\n"))


@given(moves_lists)
def test_trace_capital_increments(moves):
    strat = MultiplicativeContrarian(Fraction(1, 2))
    trace = run_game(strat, FixedPath(moves), len(moves))
    prev = Fraction(0)
    for r in trace.rounds:
        assert r.capital - prev == r.stake * r.x
        prev = r.capital


def test_run_game_deterministic_replay():
    a = run_game(MultiplicativeContrarian(Fraction(1, 4)), FixedPath([1, -1, -1, 1]), 4)
    b = run_game(MultiplicativeContrarian(Fraction(1, 4)), FixedPath([1, -1, -1, 1]), 4)
    assert a.rounds == b.rounds


def test_float64_overflow_detection():
    trace = GameTrace(mode=NumericMode.FLOAT64)
    trace.play(1e308, 1)
    with pytest.raises(GameError):
        trace.play(1e308, 1)
