"""Reality move sources: fixed paths, seeded coins, and adversaries.

Reality moves after seeing Skeptic's stake, so adversarial sources here
are information-superior: the greedy source flips the sign of the stake,
and the minimax source searches the full remaining game tree for the move
sequence minimizing Skeptic's final wealth, given the strategy's declared
(clonable, deterministic) response function.
"""

from __future__ import annotations

import random
from fractions import Fraction

DEFAULT_MINIMAX_CAP = 22


class RealityError(Exception):
    pass


class RealitySource:
    def next_move(self, history, stake) -> int:
        raise NotImplementedError


class FixedPath(RealitySource):
    """Replays a given move sequence; errors past its end."""

    def __init__(self, moves):
        self.moves = tuple(moves)
        self._i = 0

    def next_move(self, history, stake) -> int:
        if self._i >= len(self.moves):
            raise RealityError(f"fixed path exhausted after {len(self.moves)} moves")
        x = self.moves[self._i]
        self._i += 1
        return x


class Alternating(RealitySource):
    """Emits +1, -1, +1, ..."""

    def __init__(self):
        self._i = 0

    def next_move(self, history, stake) -> int:
        self._i += 1
        return 1 if self._i % 2 else -1


class IIDCoin(RealitySource):
    """Seeded fair coin; bit-for-bit reproducible for a fixed seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def next_move(self, history, stake) -> int:
        return 2 * self._rng.getrandbits(1) - 1


def iid_path(seed: int, n: int) -> list[int]:
    """The first n moves an IIDCoin(seed) would produce."""
    rng = random.Random(seed)
    return [2 * rng.getrandbits(1) - 1 for _ in range(n)]


class Greedy(RealitySource):
    """Plays -sign(stake), so Skeptic's single-round gain is never positive."""

    def __init__(self, tie: int = -1):
        if tie not in (-1, 1):
            raise RealityError(f"tie-break must be -1 or +1, got {tie!r}")
        self.tie = tie

    def next_move(self, history, stake) -> int:
        if stake > 0:
            return -1
        if stake < 0:
            return 1
        return self.tie


def worst_case(strategy, rounds: int, objective: str = "final",
               depth_cap: int = DEFAULT_MINIMAX_CAP):
    """Exhaustive adversarial value of a strategy over ``rounds`` moves.

    Returns (value, path) minimizing Skeptic's final wealth
    (objective="final") or the running minimum of wealth over the play-out
    (objective="running_min").  The strategy instance is not mutated.
    Search is memoized on the strategy's state_key when it provides one;
    ties prefer the -1 move.
    """
    if rounds > depth_cap:
        raise RealityError(f"minimax depth {rounds} exceeds cap {depth_cap}")
    if objective not in ("final", "running_min"):
        raise RealityError(f"unknown objective {objective!r}")
    memo: dict = {}

    def search(strat, left: int):
        if left == 0:
            return strat.wealth, ()
        key = strat.state_key()
        if key is not None:
            hit = memo.get((left, key))
            if hit is not None:
                return hit
        stake = strat.next_stake()
        best = None
        best_path = ()
        for x in (-1, 1):
            nxt = strat.clone()
            nxt.observe(x)
            val, path = search(nxt, left - 1)
            if objective == "running_min":
                val = min(val, nxt.wealth)
            if best is None or val < best:
                best = val
                best_path = (x,) + path
        strat._pending = None  # roll back the probe stake on the shared parent
        if key is not None:
            memo[(left, key)] = (best, best_path)
        return best, best_path

    return search(strategy.clone(), rounds)


class Minimax(RealitySource):
    """Adversary that replays the strategy and searches the remaining tree.

    Needs its own copy of the strategy (``mirror``) to evaluate futures;
    the mirror is kept in lockstep with the observed history, and each
    announced stake is checked against it, so the searched opponent really
    is the strategy being played.
    """

    def __init__(self, strategy_factory, horizon: int,
                 depth_cap: int = DEFAULT_MINIMAX_CAP):
        self.horizon = horizon
        if horizon > depth_cap:
            raise RealityError(f"minimax depth {horizon} exceeds cap {depth_cap}")
        self.mirror = strategy_factory() if callable(strategy_factory) else strategy_factory.clone()
        self._round = 0

    def next_move(self, history, stake) -> int:
        expected = self.mirror.next_stake()
        if expected != stake:
            raise RealityError(
                f"minimax mirror desynchronized: strategy bet {stake}, mirror {expected}")
        left = self.horizon - self._round
        best_x = -1
        best_val = None
        for x in (-1, 1):
            probe = self.mirror.clone()
            probe.observe(x)
            val, _ = worst_case(probe, left - 1, depth_cap=self.horizon)
            if best_val is None or val < best_val:
                best_val = val
                best_x = x
        self.mirror.observe(best_x)
        self._round += 1
        return best_x


def parse_reality(spec: str, strategy_factory=None, horizon: int | None = None) -> RealitySource:
    """Build a reality source from a spec string.

    Grammar: ``fixed:+1-1+1`` (or ``fixed:+-+``), ``iid:seed=<int>``,
    ``alt``, ``greedy[:tie=-1|+1]``, ``minimax:depth=<int>`` (requires the
    strategy so the adversary can re-simulate it).
    """
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head == "fixed":
        from .game import Situation
        return FixedPath(Situation.from_string(rest).moves)
    if head == "alt":
        return Alternating()
    if head == "iid":
        args = _args(rest)
        return IIDCoin(int(args["seed"]))
    if head == "greedy":
        args = _args(rest) if rest else {}
        return Greedy(tie=int(args.get("tie", "-1")))
    if head == "minimax":
        if strategy_factory is None:
            raise RealityError("minimax reality needs the strategy to re-simulate")
        args = _args(rest)
        depth = int(args["depth"])
        return Minimax(strategy_factory, horizon if horizon is not None else depth,
                       depth_cap=depth)
    raise RealityError(f"unknown reality spec {spec!r}")


def _args(rest: str) -> dict:
    out = {}
    for part in rest.split(","):
        if not part:
            continue
        key, _, val = part.partition("=")
        out[key.strip()] = val.strip()
    return out
