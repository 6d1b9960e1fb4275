"""Skeptic's betting strategies and the combinators that assemble them.

Every strategy is a small stateful machine: ``next_stake()`` announces the
bet for the coming round from the observed history only, ``observe(x)``
feeds back Reality's move.  Each instance keeps its own account: the
cumulative gain from zero plus the initial endowment it was set up with.
Mixtures split one unit of capital across component accounts; stopped
strategies bet zero forever once their guard trips.
"""

from __future__ import annotations

from fractions import Fraction

from . import pricing
from .stopping import boundary_exceeds


class StrategyError(Exception):
    pass


def _rat(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class Strategy:
    """Base bettor: call next_stake() then observe() once per round."""

    def __init__(self, initial_capital=Fraction(1), exact: bool = True):
        self.exact = exact
        zero = Fraction(0) if exact else 0.0
        self.initial_capital = _rat(initial_capital) if exact else float(initial_capital)
        self.gain = zero
        self.n = 0
        self.s = 0
        self.stopped = False
        self._pending = None

    @property
    def wealth(self):
        return self.initial_capital + self.gain

    def next_stake(self):
        if self._pending is not None:
            raise StrategyError("next_stake() called twice without observe()")
        stake = self._zero() if self.stopped else self._stake()
        self._pending = stake
        return stake

    def observe(self, x: int) -> None:
        if x not in (-1, 1):
            raise StrategyError(f"move must be -1 or +1, got {x!r}")
        if self._pending is None:
            # spectator update: treat as a zero stake
            self._pending = self._zero()
        self.gain += self._pending * x
        self._pending = None
        self.n += 1
        self.s += x
        self._after(x)

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def _stake(self):
        raise NotImplementedError

    def _after(self, x: int) -> None:
        pass

    def clone(self) -> "Strategy":
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        return new

    def state_key(self):
        """Hashable full betting state, or None when not re-simulatable
        from a compact key (used to memoize adversarial search)."""
        return None


class MultiplicativeContrarian(Strategy):
    """Bets -c * xbar_{n-1} * wealth; account starts at one unit.

    Wealth is the running product of (1 - c * xbar_{i-1} * x_i), which
    stays strictly positive for 0 < c <= 1/2.
    """

    def __init__(self, c, exact: bool = True):
        c = _rat(c)
        if not 0 < c <= Fraction(1, 2):
            raise StrategyError(f"c must be in (0, 1/2], got {c}")
        super().__init__(Fraction(1), exact=exact)
        self.c = c if exact else float(c)

    def _stake(self):
        if self.n == 0:
            return self._zero()
        xbar = Fraction(self.s, self.n) if self.exact else self.s / self.n
        return -self.c * xbar * self.wealth

    def state_key(self):
        return ("mulc", self.c, self.n, self.s, self.gain)


class AdditiveContrarian(Strategy):
    """Bets -eps * s_{n-1}, ignoring the collateral duty (unstopped)."""

    def __init__(self, eps, exact: bool = True):
        eps = _rat(eps)
        if eps <= 0:
            raise StrategyError(f"eps must be > 0, got {eps}")
        super().__init__(Fraction(1), exact=exact)
        self.eps = eps if exact else float(eps)

    def _stake(self):
        return -self.eps * self.s

    def state_key(self):
        return ("addc", self.eps, self.s, self.gain)


class StoppedAdditive(Strategy):
    """Additive contrarian with the bankruptcy-avoiding stop rule.

    eps must have the form 2/m for a positive integer m, so the guard
    |s_{i-1}| <= sqrt(i + 2/eps) - 1 is the exact integer test
    (|s_{i-1}| + 1)^2 <= i + m.  Once the guard fails at any round, all
    later stakes are zero.
    """

    def __init__(self, eps, exact: bool = True):
        eps = _rat(eps)
        m = Fraction(2) / eps if eps > 0 else Fraction(0)
        if m < 1 or m.denominator != 1:
            raise StrategyError(f"eps must be 2/m for a positive integer m, got {eps}")
        super().__init__(Fraction(1), exact=exact)
        self.m = int(m)
        self.eps = eps if exact else float(eps)

    def _stake(self):
        i = self.n + 1
        if (abs(self.s) + 1) ** 2 > i + self.m:
            self.stopped = True
            return self._zero()
        return -self.eps * self.s

    def state_key(self):
        return ("stopadd", self.m, self.s, self.stopped, self.gain)


class OneSided(Strategy):
    """Bets a constant 1/N toward one side until the level -N (or +N) is hit.

    direction="down": stake +1/N while min s_i > -N, gain s_n/N before the
    hit and -1 ever after.  direction="up" is the mirror image.
    """

    def __init__(self, N: int, direction: str = "down", exact: bool = True):
        if not (isinstance(N, int) and N >= 1):
            raise StrategyError(f"N must be a positive integer, got {N!r}")
        if direction not in ("down", "up"):
            raise StrategyError(f"direction must be 'down' or 'up', got {direction!r}")
        super().__init__(Fraction(1), exact=exact)
        self.N = N
        self.direction = direction

    def _stake(self):
        unit = Fraction(1, self.N) if self.exact else 1.0 / self.N
        return unit if self.direction == "down" else -unit

    def _after(self, x: int) -> None:
        if not self.stopped:
            if self.direction == "down" and self.s <= -self.N:
                self.stopped = True
            elif self.direction == "up" and self.s >= self.N:
                self.stopped = True

    def state_key(self):
        return ("oneside", self.N, self.direction, self.s, self.stopped)


class PathBettor(Strategy):
    """Bets the whole account on one target situation realizing.

    The account starts at ``budget`` and doubles on every matched move;
    any mismatch wipes it to zero, after which stakes are zero too.
    """

    def __init__(self, target, budget, exact: bool = True):
        budget = _rat(budget)
        if budget <= 0:
            raise StrategyError(f"budget must be > 0, got {budget}")
        target = tuple(target)
        for y in target:
            if y not in (-1, 1):
                raise StrategyError(f"target moves must be +-1, got {y!r}")
        super().__init__(budget, exact=exact)
        self.target = target
        if not exact:
            self.initial_capital = float(budget)

    def _stake(self):
        if self.n >= len(self.target):
            return self._zero()
        return self.target[self.n] * self.wealth

    def state_key(self):
        return ("pathbet", self.target, self.n, self.gain)


class Mixture(Strategy):
    """Weighted mixture of strategies plus an idle-cash tail.

    Each component bets on its own account; the mixture's stake is the
    weighted sum of component stakes, so its gain is exactly the weighted
    sum of component gains.  Weights plus tail must sum to one.
    """

    def __init__(self, components, tail_weight=Fraction(0), exact: bool = True):
        components = [(_rat(w), strat) for w, strat in components]
        tail_weight = _rat(tail_weight)
        if any(w <= 0 for w, _ in components):
            raise StrategyError("component weights must be > 0")
        if tail_weight < 0:
            raise StrategyError("tail weight must be >= 0")
        total = sum(w for w, _ in components) + tail_weight
        if total != 1:
            raise StrategyError(f"weights plus tail must sum to 1, got {total}")
        initial = sum((w * s.initial_capital for w, s in components), tail_weight)
        super().__init__(initial, exact=exact)
        if not exact:
            components = [(float(w), s) for w, s in components]
        self.components = components
        self.tail_weight = tail_weight if exact else float(tail_weight)

    def _stake(self):
        return sum((w * s.next_stake() for w, s in self.components), self._zero())

    def _after(self, x: int) -> None:
        for _, s in self.components:
            s.observe(x)

    def component_gain(self):
        return sum((w * s.gain for w, s in self.components), self._zero())

    def clone(self) -> "Mixture":
        new = super().clone()
        new.components = [(w, s.clone()) for w, s in self.components]
        return new

    def state_key(self):
        keys = tuple(s.state_key() for _, s in self.components)
        return None if any(k is None for k in keys) else ("mix", keys)


def truncated_q(depth: int = 20, exact: bool = True) -> Mixture:
    """Finite truncation of the 2^-i mixture of multiplicative contrarians.

    Components c = 1/2^i with weight 2^-i for i = 1..depth; the residual
    2^-depth is held as idle cash so the truncation is itself a legal
    strategy.
    """
    if depth < 1:
        raise StrategyError("mixture depth must be >= 1")
    comps = [(Fraction(1, 1 << i), MultiplicativeContrarian(Fraction(1, 1 << i), exact=exact))
             for i in range(1, depth + 1)]
    return Mixture(comps, tail_weight=Fraction(1, 1 << depth), exact=exact)


class ExcursionOutcome:
    """Record of one excursion seen by the sign-forcing bettor."""

    __slots__ = ("w", "v", "side", "multiplier", "hedged")

    def __init__(self, w, v, side, multiplier, hedged):
        self.w = w
        self.v = v
        self.side = side            # +1 / -1 at absorption, None if unfinished
        self.multiplier = multiplier
        self.hedged = hedged        # True when the hedge ran to absorption

    def __repr__(self):
        return (f"ExcursionOutcome(w={self.w}, v={self.v}, side={self.side}, "
                f"multiplier={self.multiplier}, hedged={self.hedged})")


class SignForcing(Strategy):
    """Buys half-capital boundary tickets at every origin return.

    At each return to the origin (round w) the bettor starts the
    delta-hedge replication of the offset-w boundary ticket, sized at half
    the current wealth, using the symmetric-tail value table whose root is
    exactly 1/2.  At absorption the wealth is exactly 3/2 (negative side)
    or 1/2 (positive side) of the wealth at w.

    Hedging a ticket exactly needs a value table reaching the absorption
    round; tables are built with a causal per-excursion horizon
    min(hedge_cap, max(64, 8 * w), rounds remaining), and an excursion is
    attempted only when that horizon is at least 2 * w.  Excursions that
    outlive their table, or start too late to attempt, are carried without
    bets and recorded as unhedged.
    """

    def __init__(self, hedge_cap: int = 1024, run_horizon: int | None = None):
        super().__init__(Fraction(1), exact=True)
        if hedge_cap < 4:
            raise StrategyError("hedge_cap must be >= 4")
        self.hedge_cap = hedge_cap
        self.run_horizon = run_horizon
        self.phase = "wait_origin"
        self.excursion_log: list[ExcursionOutcome] = []
        self._w = None
        self._w_wealth = None
        self._table = None
        self._truncated = False

    def _stake(self):
        if self.phase != "hedging" or self._table is None:
            return Fraction(0)
        rel = self.n - self._w
        return self._w_wealth * pricing.delta_hedge_bet(self._table, rel, self.s)

    def _after(self, x: int) -> None:
        if self.phase == "wait_origin":
            if self.s == 0:
                self._start_excursion()
        elif self.phase == "hedging":
            if boundary_exceeds(self.n, self.s):
                hedged = self._table is not None
                self.excursion_log.append(ExcursionOutcome(
                    w=self._w, v=self.n, side=1 if self.s > 0 else -1,
                    multiplier=self.wealth / self._w_wealth, hedged=hedged))
                self._table = None
                self.phase = "wait_origin"
            elif self._table is not None and self.n - self._w >= self._table.horizon:
                self._table = None
                self._truncated = True

    def _start_excursion(self) -> None:
        w = self.n
        horizon = min(self.hedge_cap, max(64, 8 * w))
        if self.run_horizon is not None:
            horizon = min(horizon, self.run_horizon - w)
        self._w = w
        self._w_wealth = self.wealth
        self._truncated = False
        if horizon >= 2 * w and horizon >= 1:
            self._table = pricing.eta_table(w, horizon, "half")
        else:
            self._table = None
        self.phase = "hedging"

    def clone(self) -> "SignForcing":
        new = super().clone()
        new.excursion_log = list(self.excursion_log)
        return new  # the eta table is immutable and safely shared


# ---------------------------------------------------------------------------
# strategy spec mini-language (CLI)
# ---------------------------------------------------------------------------

def parse_strategy(spec: str, exact: bool = True) -> Strategy:
    """Build a strategy from a compact spec string.

    Grammar::

        mulc:c=<rat>                  multiplicative contrarian
        addc:eps=<rat>                additive contrarian, unstopped
        stopadd:eps=2/<m>             additive contrarian with stop rule
        oneside:N=<int>,dir=down|up   one-sided bettor
        pathbet:target=<moves>,budget=<rat>
        signforce[:cap=<int>]         excursion ticket bettor
        q[:depth=<int>]               truncated 2^-i contrarian mixture
        zero                          never bets
        mix:[<w>@<spec>;...;<tail>]   weighted mixture, ';'-separated,
                                      optional trailing bare tail weight

    Rationals parse as "num/den" or plain integers; move strings as in
    ``Situation.from_string`` (e.g. "+1-1" or "+-").
    """
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head == "zero":
        return ZeroStrategy(exact=exact)
    if head == "mulc":
        return MultiplicativeContrarian(_spec_args(rest)["c"], exact=exact)
    if head == "addc":
        return AdditiveContrarian(_spec_args(rest)["eps"], exact=exact)
    if head == "stopadd":
        return StoppedAdditive(_spec_args(rest)["eps"], exact=exact)
    if head == "oneside":
        args = _spec_args(rest, rational=False)
        return OneSided(int(args["N"]), args.get("dir", "down"), exact=exact)
    if head == "pathbet":
        from .game import Situation
        args = _spec_args(rest, rational=False)
        target = Situation.from_string(args["target"]).moves
        return PathBettor(target, Fraction(args["budget"]), exact=exact)
    if head == "signforce":
        args = _spec_args(rest, rational=False) if rest else {}
        return SignForcing(hedge_cap=int(args.get("cap", 1024)))
    if head == "q":
        args = _spec_args(rest, rational=False) if rest else {}
        return truncated_q(int(args.get("depth", 20)), exact=exact)
    if head == "mix":
        if not (rest.startswith("[") and rest.endswith("]")):
            raise StrategyError(f"mixture spec needs [...], got {spec!r}")
        comps = []
        tail = Fraction(0)
        for part in rest[1:-1].split(";"):
            part = part.strip()
            if not part:
                continue
            if "@" in part:
                w, _, sub = part.partition("@")
                comps.append((Fraction(w), parse_strategy(sub, exact=exact)))
            else:
                tail = Fraction(part)
        return Mixture(comps, tail_weight=tail, exact=exact)
    raise StrategyError(f"unknown strategy spec {spec!r}")


def _spec_args(rest: str, rational: bool = True) -> dict:
    out = {}
    for part in rest.split(","):
        if not part:
            continue
        key, _, val = part.partition("=")
        if not val:
            raise StrategyError(f"malformed strategy argument {part!r}")
        out[key.strip()] = Fraction(val) if rational else val.strip()
    return out


class ZeroStrategy(Strategy):
    """Never bets; useful as a mixture filler and in tests."""

    def _stake(self):
        return self._zero()

    def state_key(self):
        return ("zero",)
