"""Acceptance gate: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines
as they print (pytest captures stdout otherwise; captured lines still
appear in failure reports).  Every check is exact unless a tolerance is
stated in the test body.
"""

import sys
import time
from fractions import Fraction

import numpy as np

from faircoin.game import run_game
from faircoin.pricing import (
    bracket_series,
    enumerate_absorption,
    eta_table,
    replicate_and_verify,
    upper_price_bracket,
)
from faircoin.reality import Greedy, iid_path, worst_case
from faircoin.stopping import boundary_exceeds, excursions
from faircoin.strategies import (
    OneSided,
    SignForcing,
    StoppedAdditive,
    truncated_q,
)
from faircoin.verify import (
    exhaustive_additive_check,
    exhaustive_log_bound_check,
    exhaustive_one_sided_check,
    exhaustive_product_check,
    exhaustive_summation_check,
    log_bound_margin_curve,
    mulc_capital_curve,
)


def verdict(number: int, description: str, failures: list) -> None:
    ok = not failures
    line = f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {description}"
    print(line, file=sys.stderr, flush=True)
    assert ok, line + "; failures: " + "; ".join(map(str, failures))


def test_01_additive_closed_form_length16():
    start = time.monotonic()
    failures = []
    for eps in (Fraction(2), Fraction(1), Fraction(1, 2), Fraction(2, 7)):
        report = exhaustive_additive_check(eps, 16)
        if not report.passed:
            failures.append(f"eps={eps}: {report.to_json_dict()}")
    elapsed = time.monotonic() - start
    if elapsed >= 120:
        failures.append(f"runtime {elapsed:.0f}s exceeds 2 minutes")
    verdict(1, "additive capital equals (eps/2)(n - s^2) on all 2^16 paths "
               "of length 16, four eps values, under 2 minutes", failures)


def test_02_product_capital_length14():
    failures = []
    for c in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        report = exhaustive_product_check(c, 14)  # also asserts factors > 0
        if not report.passed:
            failures.append(f"c={c}: {report.to_json_dict()}")
    verdict(2, "multiplicative capital equals the factor product with every "
               "factor positive, exhaustive to length 14", failures)


def test_03_summation_identity_length14():
    report = exhaustive_summation_check(14)
    verdict(3, "partial-summation identity has zero discrepancy on all "
               "paths to length 14",
            [] if report.passed else [report.to_json_dict()])


def test_04_log_lower_bound():
    failures = []
    for c in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        report = exhaustive_log_bound_check(c, 14, slack=1e-9)
        if not report.passed:
            failures.append(f"exhaustive c={c}: {report.to_json_dict()}")
    rng = np.random.default_rng(20260823)
    worst = np.inf
    for _ in range(1000):
        moves = rng.choice([-1.0, 1.0], size=10**5)
        worst = min(worst, log_bound_margin_curve(moves, 0.5).min())
    if worst < -1e-9:
        failures.append(f"random-path margin {worst} below -1e-9")
    verdict(4, "log capital lower bound holds exhaustively to length 14 and "
               "on 1000 random paths of length 1e5 (slack 1e-9)", failures)


def test_05_collateral_duty_adversarial():
    failures = []
    strategies = ([(f"stopadd m={m}", lambda m=m: StoppedAdditive(Fraction(2, m)))
                   for m in (1, 2, 4, 8)]
                  + [(f"oneside N={N} {d}", lambda N=N, d=d: OneSided(N, d))
                     for N in (1, 2, 3) for d in ("down", "up")])
    for name, make in strategies:
        # min over ALL 2^20 paths of the running-min wealth (memoized on
        # the strategy's full betting state, so the sweep is exhaustive)
        low, path = worst_case(make(), 20, objective="running_min")
        if low < 0:
            failures.append(f"{name}: exhaustive/minimax min wealth {low} on {path}")
        greedy_low = run_game(make(), Greedy(), 20).min_wealth()
        if greedy_low < 0:
            failures.append(f"{name}: greedy min wealth {greedy_low}")
        final, _ = worst_case(make(), 20)  # minimax objective: final wealth
        if final < 0:
            failures.append(f"{name}: minimax final wealth {final}")
    verdict(5, "wealth 1 + K stays nonnegative for stopped-additive "
               "(m in 1,2,4,8) and one-sided strategies: exhaustive length 20, "
               "greedy, and minimax depth 20", failures)


def test_06_one_sided_capital_length14():
    failures = []
    for N in (1, 2, 3):
        for direction in ("down", "up"):
            report = exhaustive_one_sided_check(N, direction, 14)
            if not report.passed:
                failures.append(f"N={N} {direction}: {report.to_json_dict()}")
    verdict(6, "one-sided capital equals +-s/N before the level hit and -1 "
               "after, exhaustive to length 14, N in 1,2,3", failures)


def _absorbed_negative_full_count(l: int, k: int) -> int:
    # independent second count: forward DP over (sum, status) classifying
    # whole length-k sequences instead of first-absorption prefixes
    live = {0: 1}
    absorbed_neg = 0  # weighted by remaining free moves
    for n in range(1, k + 1):
        absorbed_neg *= 2
        nxt = {}
        for s, cnt in live.items():
            for child in (s - 1, s + 1):
                if boundary_exceeds(n, child, l):
                    if child < 0:
                        absorbed_neg += cnt
                else:
                    nxt[child] = nxt.get(child, 0) + cnt
        live = nxt
    return absorbed_neg


def test_07_absorption_counting():
    failures = []
    for l in (0, 1, 4, 9):
        census = enumerate_absorption(l, 24)
        for k in range(1, 25):
            b_k = sum(a << (k - i) for i, a in enumerate(census.a[:k], start=1))
            other = _absorbed_negative_full_count(l, k)
            if b_k != other:
                failures.append(f"l={l} k={k}: counts {b_k} != {other}")
            if b_k > 1 << (k - 1):
                failures.append(f"l={l} k={k}: b_k={b_k} > 2^(k-1)")
            if l == 0 and b_k != 1 << (k - 1):
                failures.append(f"l=0 k={k}: bound not tight, b_k={b_k}")
        if census.budget_sum > Fraction(1, 2):
            failures.append(f"l={l}: sum a_i 2^-i = {census.budget_sum} > 1/2")
    verdict(7, "absorption counts: two independent counts agree, "
               "b_k <= 2^(k-1) with equality at l=0, and the 2^-i-weighted "
               "sum stays <= 1/2, for l in 0,1,4,9 up to k=24", failures)


def test_08_price_brackets_to_4096():
    failures = []
    for l in (0, 4, 9):
        prev = None
        for b in bracket_series(l, 4096):
            if Fraction(1, 2) not in b:
                failures.append(f"l={l} h={b.horizon}: 1/2 outside bracket")
                break
            if b.lower + b.upper != 1:
                failures.append(f"l={l} h={b.horizon}: absorbed masses differ")
                break
            if prev and (b.lower < prev.lower or b.upper > prev.upper):
                failures.append(f"l={l} h={b.horizon}: brackets do not nest")
                break
            if l == 0 and (b.lower, b.upper) != (Fraction(1, 2), Fraction(1, 2)):
                failures.append(f"l=0 h={b.horizon}: bracket not [1/2, 1/2]")
                break
            prev = b
        # dual route: backward-induction roots at sampled horizons
        for h in (1, 2, 3, 4, 8, 16, 64):
            direct = upper_price_bracket(l, h)
            series = bracket_series(l, h)[-1]
            if (direct.lower, direct.upper) != (series.lower, series.upper):
                failures.append(f"l={l} h={h}: forward and backward routes differ")
    verdict(8, "price brackets nest, contain 1/2, and split absorbed mass "
               "evenly at every horizon to 4096 (l in 0,4,9; l=0 pinned "
               "at [1/2, 1/2])", failures)


def test_09_replication_to_depth16():
    failures = []
    for l in (0, 4):
        for h in range(1, 17):
            try:
                report = replicate_and_verify(l, h)
                if not report["ok"]:
                    failures.append(f"l={l} h={h}: {report}")
            except Exception as exc:
                failures.append(f"l={l} h={h}: {exc}")
    verdict(9, "delta hedge from the upper bracket value superreplicates the "
               "ticket and the path-bettor portfolio pays exactly 1 on "
               "absorbed-negative cylinders, horizons 1..16, l in 0,4", failures)


def test_10_sign_forcing_million_rounds():
    failures = []
    n = 10**6
    path = iid_path(12345, n)
    strat = SignForcing(hedge_cap=1024, run_horizon=n)
    for x in path:
        strat.next_stake()
        strat.observe(x)
    schedule = [(p.w, p.v) for p in excursions(path) if p.v is not None]
    logged = [(e.w, e.v) for e in strat.excursion_log]
    if logged != schedule:
        failures.append(f"excursion schedule mismatch: {logged} != {schedule}")
    hedged = [e for e in strat.excursion_log if e.hedged]
    if not hedged:
        failures.append("no excursion was hedged to absorption")
    for e in strat.excursion_log:
        expect = (Fraction(3, 2) if e.side == -1 else Fraction(1, 2)) \
            if e.hedged else Fraction(1)
        if e.multiplier != expect:
            failures.append(f"excursion w={e.w}: multiplier {e.multiplier} "
                            f"!= {expect} (hedged={e.hedged})")
    wealth = Fraction(1)
    for e in strat.excursion_log:
        wealth *= e.multiplier
    if strat.wealth != wealth:
        failures.append(f"final wealth {strat.wealth} != product {wealth}")
    verdict(10, "over a seeded 1e6-round run every hedge-completed excursion "
                "multiplies wealth by exactly 3/2 (negative hit) or 1/2 "
                "(positive hit), matching the independent excursion schedule; "
                "excursions outliving the hedge table are reported unhedged",
            failures)


def test_11_forcing_surrogate_alternating():
    failures = []
    n = 10**6
    # stopped additive, eps = 1 (= 2/2), exact arithmetic round by round
    strat = StoppedAdditive(Fraction(1))
    prev = strat.wealth
    for i in range(n):
        strat.next_stake()
        strat.observe(1 if i % 2 == 0 else -1)
        if strat.wealth < prev:
            failures.append(f"stopped-additive wealth decreased at round {i + 1}")
            break
        prev = strat.wealth
    if strat.stopped:
        failures.append("stopped-additive stopped on the alternating path")
    if strat.wealth != 1 + Fraction(n, 2):
        failures.append(f"stopped-additive wealth {strat.wealth} != {1 + n // 2}")
    if strat.wealth < 10:
        failures.append("stopped-additive wealth below 10x initial")

    # truncated 2^-i mixture via its product-formula capital curves (the
    # exact mixture at 1e6 rounds is out of reach; the curve is the same
    # closed form the engine satisfies, re-checked against the engine on
    # a 2000-round prefix below)
    x = np.empty(n)
    x[0::2] = 1.0
    x[1::2] = -1.0
    depth = 20
    curve = np.full(n, 2.0**-depth)
    for i in range(1, depth + 1):
        curve += 2.0**-i * mulc_capital_curve(x, 2.0**-i)
    if np.diff(curve).min() < 0:
        failures.append("truncated-Q wealth curve decreases on the alternating path")
    final = curve[-1]
    if final <= 10:
        failures.append(f"truncated-Q wealth {final} not above 10x initial")
    # golden value pinned from the oracle run of this implementation
    if abs(final - 21.315261252171535) > 1e-6:
        failures.append(f"truncated-Q wealth {final} drifted from pinned 21.3152612...")

    q = truncated_q(depth, exact=False)
    check = 2000
    for i in range(check):
        q.next_stake()
        q.observe(1 if i % 2 == 0 else -1)
    if abs(q.wealth - curve[check - 1]) > 1e-9:
        failures.append(f"engine wealth {q.wealth} != curve {curve[check - 1]} "
                        f"at round {check}")

    verdict(11, "on the alternating path both the truncated mixture and the "
                "stopped-additive bettor grow monotonically past 10x initial "
                "capital by n = 1e6 (mixture pinned at 21.31526 +- 1e-6)",
            failures)
