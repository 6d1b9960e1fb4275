"""Fair-coin betting protocol: situations, traces, and game execution.

Each round Skeptic announces a stake, Reality answers with a move in
{-1, +1}, and Skeptic's cumulative gain moves by stake * move.  Gains are
tracked from zero; the initial capital rides alongside the trace so that
collateral (non-bankruptcy) checks stay explicit.

Two numeric modes are supported: exact rational arithmetic (the default,
used for all identity and pricing verification) and float64 for long
simulations where exact denominators would blow up.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterable, Iterator, Sequence


class GameError(Exception):
    """Protocol-level failure (bad move, float overflow, ...)."""


class NumericMode(Enum):
    EXACT = "exact"
    FLOAT64 = "float64"


def validate_move(x: int) -> int:
    if x not in (-1, 1):
        raise GameError(f"move must be -1 or +1, got {x!r}")
    return x


def moves_of(prefix) -> tuple[int, ...]:
    """Normalize a Situation or iterable of +-1 ints to a move tuple."""
    if isinstance(prefix, Situation):
        return prefix.moves
    return tuple(validate_move(x) for x in prefix)


@dataclass(frozen=True)
class Situation:
    """A finite sequence of moves: one node of the binary game tree."""

    moves: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        for x in self.moves:
            validate_move(x)

    @classmethod
    def from_string(cls, text: str) -> "Situation":
        """Parse "+1-1+1" (or the shorthand "+-+") into a Situation."""
        moves = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch not in "+-":
                raise GameError(f"bad move string {text!r} at position {i}")
            moves.append(1 if ch == "+" else -1)
            i += 2 if text[i + 1 : i + 2] == "1" else 1
        return cls(tuple(moves))

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self) -> Iterator[int]:
        return iter(self.moves)

    def __neg__(self) -> "Situation":
        return Situation(tuple(-x for x in self.moves))

    def child(self, x: int) -> "Situation":
        return Situation(self.moves + (validate_move(x),))

    @property
    def n(self) -> int:
        return len(self.moves)

    @cached_property
    def s(self) -> int:
        return sum(self.moves)

    @property
    def xbar(self) -> Fraction:
        return Fraction(self.s, self.n) if self.moves else Fraction(0)


EMPTY = Situation()


@dataclass(frozen=True)
class ProcessValues:
    n: int
    s: int
    xbar: Fraction


def process_values(prefix) -> ProcessValues:
    """Sum and average of a situation; the empty situation maps to (0, 0, 0)."""
    moves = moves_of(prefix)
    n = len(moves)
    s = sum(moves)
    return ProcessValues(n=n, s=s, xbar=Fraction(s, n) if n else Fraction(0))


@dataclass(frozen=True)
class Round:
    n: int
    x: int
    stake: Fraction | float
    capital: Fraction | float  # cumulative gain K_n (zero initial capital)
    s: int


@dataclass
class GameTrace:
    """Round-by-round record of one play-out.

    ``capital`` in each round is the zero-initial-capital gain K_n; total
    wealth after round n is ``initial_capital + K_n``.
    """

    initial_capital: Fraction | float = Fraction(1)
    mode: NumericMode = NumericMode.EXACT
    rounds: list[Round] = field(default_factory=list)

    @property
    def final_capital(self):
        return self.rounds[-1].capital if self.rounds else self._zero()

    @property
    def final_s(self) -> int:
        return self.rounds[-1].s if self.rounds else 0

    @property
    def moves(self) -> tuple[int, ...]:
        return tuple(r.x for r in self.rounds)

    def _zero(self):
        return 0.0 if self.mode is NumericMode.FLOAT64 else Fraction(0)

    def play(self, stake, move: int) -> "GameTrace":
        validate_move(move)
        prev = self.rounds[-1] if self.rounds else None
        k_prev = prev.capital if prev else self._zero()
        s_prev = prev.s if prev else 0
        n = (prev.n if prev else 0) + 1
        if self.mode is NumericMode.FLOAT64:
            stake = float(stake)
        capital = k_prev + stake * move
        if self.mode is NumericMode.FLOAT64 and not math.isfinite(capital):
            raise GameError(f"capital overflowed float64 range at round {n}")
        self.rounds.append(Round(n=n, x=move, stake=stake, capital=capital, s=s_prev + move))
        return self

    def wealth(self, i: int):
        """Total wealth after round i (i=0 gives the initial capital)."""
        if i == 0:
            return self.initial_capital
        return self.initial_capital + self.rounds[i - 1].capital

    def min_wealth(self):
        w = self.initial_capital
        for r in self.rounds:
            w = min(w, self.initial_capital + r.capital)
        return w

    # -- serialization -----------------------------------------------------

    CSV_COLUMNS = ("n", "x", "M", "K", "s")

    def write_csv(self, f: IO[str]) -> None:
        writer = csv.writer(f)
        writer.writerow(self.CSV_COLUMNS)
        for r in self.rounds:
            writer.writerow([r.n, r.x, fmt_number(r.stake), fmt_number(r.capital), r.s])

    @classmethod
    def read_csv(cls, f: IO[str], initial_capital=Fraction(1),
                 mode: NumericMode = NumericMode.EXACT) -> "GameTrace":
        reader = csv.reader(f)
        header = next(reader)
        if tuple(header) != cls.CSV_COLUMNS:
            raise GameError(f"unexpected CSV header {header!r}")
        trace = cls(initial_capital=initial_capital, mode=mode)
        for row in reader:
            n, x, m, k, s = row
            trace.rounds.append(Round(n=int(n), x=int(x), stake=parse_number(m, mode),
                                      capital=parse_number(k, mode), s=int(s)))
        return trace

    def write_jsonl(self, f: IO[str]) -> None:
        for r in self.rounds:
            f.write(json.dumps({"n": r.n, "x": r.x, "M": fmt_number(r.stake),
                                "K": fmt_number(r.capital), "s": r.s}) + "\n")

    @classmethod
    def read_jsonl(cls, f: IO[str], initial_capital=Fraction(1),
                   mode: NumericMode = NumericMode.EXACT) -> "GameTrace":
        trace = cls(initial_capital=initial_capital, mode=mode)
        for line in f:
            if not line.strip():
                continue
            d = json.loads(line)
            trace.rounds.append(Round(n=d["n"], x=d["x"], stake=parse_number(d["M"], mode),
                                      capital=parse_number(d["K"], mode), s=d["s"]))
        return trace


def fmt_number(v) -> str:
    """Rationals serialize as "num/den"; floats use repr round-tripping."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return f"{v}/1"
    return repr(float(v))


def parse_number(text: str, mode: NumericMode = NumericMode.EXACT):
    if mode is NumericMode.FLOAT64:
        return float(Fraction(text)) if "/" in text else float(text)
    return Fraction(text)


def play_round(trace: GameTrace, stake, move: int) -> GameTrace:
    """Append one protocol round: K_n = K_{n-1} + stake * move."""
    return trace.play(stake, move)


def run_game(strategy, reality, horizon: int, initial_capital=Fraction(1),
             mode: NumericMode = NumericMode.EXACT, record: bool = True) -> GameTrace:
    """Play ``horizon`` rounds of the protocol.

    The strategy sees x_1..x_{n-1} through its own observe() calls before
    announcing M_n; Reality sees M_n before announcing x_n.  With
    ``record=False`` only the final round is kept (long float runs).
    """
    if horizon < 0:
        raise GameError("horizon must be >= 0")
    trace = GameTrace(initial_capital=initial_capital, mode=mode)
    history: list[int] = []
    for _ in range(horizon):
        stake = strategy.next_stake()
        move = reality.next_move(history, stake)
        validate_move(move)
        trace.play(stake, move)
        strategy.observe(move)
        history.append(move)
        if not record and len(trace.rounds) > 1:
            trace.rounds.pop(0)
    return trace


def check_collateral(trace: GameTrace, initial_capital=None) -> bool:
    """True iff initial_capital + K_n >= 0 for every round of the trace."""
    a = trace.initial_capital if initial_capital is None else initial_capital
    return all(a + r.capital >= 0 for r in trace.rounds)
