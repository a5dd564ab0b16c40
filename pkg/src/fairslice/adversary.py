"""Adversary defeating every finite protocol for two groups of size at least two.

The adversary keeps a set of closed *known intervals*.  Each query widens
the known region around the query point by halving the neighbouring gaps.
In every newly known portion all players but the asked one prefer only the
right piece (only the left piece in the rightmost interval), while the asked
player gets a short stretch of the opposite side flanked by two indifference
points.  So at every known point at least ``n - 1`` players want the same
single piece, and whatever cut the protocol finally makes, a group of size
at least two on the other side contains an envious player.

All coordinates are :class:`fractions.Fraction` so that repeated halving
never collapses a gap.
"""

from __future__ import annotations

import bisect
import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from fairslice.core import Assignment, Side, TwoPiecePreference, validate_hungry
from fairslice.protocols import verify_envy_free, _two_groups
from fairslice.queries import (
    Query, QueryBudgetExceeded, QueryKind, QueryOracle, QueryTranscript, answer_query,
)


class AdversaryInvariantError(AssertionError):
    """The adversary's bookkeeping contradicts itself; always an implementation bug."""


@dataclass
class Portion:
    """A maximal newly known stretch ``[start, end]`` where ``player`` switches at ``a`` and ``b``."""

    start: Fraction
    end: Fraction
    player: int
    a: Fraction
    b: Fraction


def _place_switches(start, end, x):
    # x strictly inside happens only for a fresh interval around x; make x itself
    # an indifference point so the query is answered on the spot
    if start < x < end:
        return x, x + (end - x) / 3
    length = end - start
    return start + 2 * length / 5, start + 3 * length / 5


class AdversaryState:
    """Known intervals plus every player's indifference points inside them."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one player")
        self.n = n
        self.intervals: list[list[Fraction]] = [[Fraction(0), Fraction(0)], [Fraction(1), Fraction(1)]]
        self.switches: list[list[Fraction]] = [[] for _ in range(n)]
        self.portions: list[Portion] = []
        # (a, b, player) of every portion, kept sorted for the local checks
        self.deviations: list[tuple] = []
        self.last_touched: tuple = (None, [])
        self.history: list[tuple] = [self._snapshot(None)]

    # -- geometry --------------------------------------------------------
    def _locate(self, x) -> Optional[int]:
        k = bisect.bisect_right([iv[0] for iv in self.intervals], x) - 1
        if k >= 0 and self.intervals[k][0] <= x <= self.intervals[k][1]:
            return k
        return None

    def is_known(self, x) -> bool:
        return self._locate(Fraction(x)) is not None

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        return [(a[1], b[0]) for a, b in zip(self.intervals, self.intervals[1:])]

    def _is_rightmost(self, k: int) -> bool:
        return k == len(self.intervals) - 1

    def _snapshot(self, query):
        return (query, tuple((iv[0], iv[1]) for iv in self.intervals))

    # -- labels ------------------------------------------------------------
    def label(self, player: int, x) -> Side:
        x = Fraction(x)
        k = self._locate(x)
        if k is None:
            raise AdversaryInvariantError(f"preference at unknown point {x} requested")
        lo, hi = self.intervals[k]
        sw = self.switches[player]
        i = bisect.bisect_left(sw, lo)
        j = bisect.bisect_left(sw, x)
        if j < len(sw) and sw[j] == x:
            return Side.BOTH
        base = Side.LEFT if self._is_rightmost(k) else Side.RIGHT
        return base.swapped() if (j - i) % 2 else base

    def majority_side(self, x) -> tuple[Side, list[int]]:
        """The side at least ``n - 1`` players single-prefer at known ``x``, and those players."""
        labels = [self.label(p, x) for p in range(self.n)]
        for side in (Side.LEFT, Side.RIGHT):
            players = [p for p, lab in enumerate(labels) if lab is side]
            if len(players) >= self.n - 1:
                return side, players
        raise AdversaryInvariantError(f"no side has n - 1 supporters at {x}: {labels}")

    # -- queries -------------------------------------------------------------
    def expand(self, player: int, x) -> list[Portion]:
        """Make ``x`` known, halving the adjacent gaps, and give ``player`` fresh switches."""
        x = Fraction(x)
        k = self._locate(x)
        new = []
        if k is not None:
            lo, hi = self.intervals[k]
            if lo > 0:
                start = lo - (lo - self.intervals[k - 1][1]) / 2
                new.append((start, lo))
                self.intervals[k][0] = start
            if hi < 1:
                end = hi + (self.intervals[k + 1][0] - hi) / 2
                new.append((hi, end))
                self.intervals[k][1] = end
        else:
            k = bisect.bisect_right([iv[0] for iv in self.intervals], x)
            g_lo, g_hi = self.intervals[k - 1][1], self.intervals[k][0]
            start, end = (g_lo + x) / 2, (x + g_hi) / 2
            self.intervals.insert(k, [start, end])
            new.append((start, end))
        portions = []
        for start, end in new:
            a, b = _place_switches(start, end, x)
            portion = Portion(start, end, player, a, b)
            portions.append(portion)
            self.portions.append(portion)
            bisect.insort(self.switches[player], a)
            bisect.insort(self.switches[player], b)
            bisect.insort(self.deviations, (a, b, player))
        self.last_touched = (x, portions)
        return portions

    def handle_query(self, query: Query):
        x = Fraction(0) if query.kind is QueryKind.FIRST else Fraction(query.point)
        kind = QueryKind.NEXT if query.kind is QueryKind.FIRST else query.kind
        self.expand(query.player, x)
        self.history.append(self._snapshot(query))
        if kind is QueryKind.EVALUATE:
            return self.label(query.player, x)
        return self._indifference(query.player, x, forward=kind is QueryKind.NEXT)

    def _indifference(self, player: int, x: Fraction, forward: bool):
        # the answer must be decided by known information: the nearest switch in
        # x's own interval, or nothing if that interval reaches the cake's end
        k = self._locate(x)
        lo, hi = self.intervals[k]
        sw = self.switches[player]
        if forward:
            j = bisect.bisect_left(sw, x)
            if j < len(sw) and sw[j] <= hi:
                return sw[j]
            if hi == 1:
                return None
        else:
            j = bisect.bisect_right(sw, x) - 1
            if j >= 0 and sw[j] >= lo:
                return sw[j]
            if lo == 0:
                return None
        raise AdversaryInvariantError(f"answer for player {player} at {x} would depend on an unknown gap")

    # -- invariants ----------------------------------------------------------
    def check_invariants(self):
        """Known intervals are disjoint, closed and leave gaps; at every known
        point at most one player deviates from the interval's base side."""
        ivs = self.intervals
        if ivs[0][0] != 0 or ivs[-1][1] != 1:
            raise AdversaryInvariantError("the end points of the cake must stay known")
        for lo, hi in ivs:
            if lo > hi:
                raise AdversaryInvariantError(f"reversed interval [{lo}, {hi}]")
        for g_lo, g_hi in self.gaps():
            if not g_lo < g_hi:
                raise AdversaryInvariantError(f"known intervals touch at {g_lo}")
        deviations = self.deviations
        if len(deviations) != len(self.portions):
            raise AdversaryInvariantError("deviation index out of sync with the portions")
        for (a0, b0, p0), (a1, b1, p1) in zip(deviations, deviations[1:]):
            if not (a0 < b0 < a1 < b1):
                raise AdversaryInvariantError(f"players {p0} and {p1} deviate on overlapping stretches")
        for player in range(self.n):
            expected = sorted(s for p in self.portions if p.player == player for s in (p.a, p.b))
            if expected != self.switches[player]:
                raise AdversaryInvariantError(f"switch bookkeeping of player {player} is inconsistent")

    # -- completion -------------------------------------------------------
    def check_local(self):
        """The invariants of :meth:`check_invariants`, restricted to what the last
        query changed: the interval holding the query point, its two neighbours
        and the new portions.  Everything else is untouched since its own check."""
        x, portions = self.last_touched
        if x is None:
            return
        ivs = self.intervals
        if ivs[0][0] != 0 or ivs[-1][1] != 1:
            raise AdversaryInvariantError("the end points of the cake must stay known")
        k = self._locate(x)
        if k is None:
            raise AdversaryInvariantError(f"query point {x} did not become known")
        for j in range(max(k - 1, 0), min(k + 2, len(ivs))):
            if ivs[j][0] > ivs[j][1]:
                raise AdversaryInvariantError(f"reversed interval {ivs[j]}")
            if j + 1 < len(ivs) and not ivs[j][1] < ivs[j + 1][0]:
                raise AdversaryInvariantError(f"known intervals touch at {ivs[j][1]}")
        for p in portions:
            if not p.start <= p.a < p.b <= p.end:
                raise AdversaryInvariantError(f"switches {p.a}, {p.b} outside their portion")
            i = bisect.bisect_left(self.deviations, (p.a, p.b, p.player))
            around = self.deviations[max(i - 1, 0): i + 2]
            for (a0, b0, p0), (a1, b1, p1) in zip(around, around[1:]):
                if not (a0 < b0 < a1 < b1):
                    raise AdversaryInvariantError(f"players {p0} and {p1} deviate on overlapping stretches")

    def completion_point(self) -> Fraction:
        g_lo, g_hi = self.gaps()[-1]
        return (g_lo + g_hi) / 2

    def complete(self) -> list[TwoPiecePreference]:
        """Fill the unknown gaps: right piece everywhere, except one switch to the
        left piece in the gap just before the rightmost known interval."""
        z = self.completion_point()
        prefs = []
        for player in range(self.n):
            switches = sorted(self.switches[player] + [z])
            prefs.append(TwoPiecePreference.alternating(switches, Side.RIGHT))
        return prefs

    def intervals_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["step", "player", "kind", "point", "interval", "start", "end"])
        for step, (query, ivs) in enumerate(self.history):
            q = ("", "", "") if query is None else (
                query.player, query.kind.value, "" if query.point is None else float(query.point))
            for idx, (lo, hi) in enumerate(ivs):
                w.writerow([step, *q, idx, float(lo), float(hi)])
        return buf.getvalue()


class AdversaryOracle(QueryOracle):
    def __init__(self, state: AdversaryState, max_queries: Optional[int] = None, check: bool = True):
        super().__init__(state.n, max_queries)
        self.state = state
        self.check = check

    def _answer(self, query: Query):
        answer = self.state.handle_query(query)
        if self.check:
            self.state.check_local()
        return answer


@dataclass
class DuelReport:
    transcript: QueryTranscript
    assignment: Optional[Assignment]
    verdict: Optional[tuple]  # (envious player, envied piece)
    budget_exhausted: bool
    completed: list
    replay_mismatches: list
    virtual_queries: list = field(default_factory=list)
    envy_violations: list = field(default_factory=list)
    completed_hungry: bool = True

    @property
    def envy_free(self) -> bool:
        return self.assignment is not None and not self.envy_violations

    @property
    def consistent(self) -> bool:
        return not self.replay_mismatches and self.completed_hungry

    @property
    def outcome(self) -> str:
        if self.budget_exhausted:
            return "budget exhausted"
        return "envy-free" if self.envy_free else "not envy-free"

    def to_json(self) -> dict:
        a = self.assignment
        return {
            "outcome": self.outcome,
            "query_count": len(self.transcript),
            "cut": None if a is None else float(a.partition.lengths[0]),
            "groups": None if a is None else [sorted(g) for g in a.groups],
            "verdict": None if self.verdict is None else {"player": self.verdict[0], "envied_piece": self.verdict[1]},
            "virtual_queries": [{"player": q.player, "kind": q.kind.value, "point": float(q.point)}
                                for q in self.virtual_queries],
            "consistent": self.consistent,
            # floats lose exactness after a few hundred halvings; keep the rationals too
            "completed_preferences": [
                {**p.to_json(), "breakpoints_exact": [str(Fraction(b)) for b in p.breakpoints]}
                for p in self.completed
            ],
        }


def finalize(state: AdversaryState, transcript: QueryTranscript, assignment: Assignment) -> DuelReport:
    """Judge the protocol's output: make the cut known, name an envious player and
    attach preference completions consistent with every answer given."""
    sizes = assignment.group_sizes
    if len(sizes) != 2 or min(sizes) < 2:
        raise ValueError(f"group sizes {sizes}: the adversary needs two groups of at least two")
    if assignment.n != state.n:
        raise ValueError("assignment and adversary disagree on the number of players")
    y = Fraction(assignment.partition.lengths[0])
    virtual = []
    if not state.is_known(y):
        q = Query(QueryKind.EVALUATE, 0, y)
        state.handle_query(q)
        virtual.append(q)
    side, supporters = state.majority_side(y)
    wanted = 0 if side is Side.LEFT else 1
    other_group = assignment.groups[1 - wanted]
    envious = [p for p in sorted(other_group) if p in supporters]
    if not envious:
        raise AdversaryInvariantError("a group of two on the minority side must contain a supporter")
    return _report(state, transcript, assignment, (envious[0], wanted), virtual)


def _report(state, transcript, assignment, verdict, virtual, budget_exhausted=False) -> DuelReport:
    state.check_invariants()
    completed = state.complete()
    mismatches = transcript.replay(lambda q: answer_query(completed[q.player], q))
    hungry = all(validate_hungry(p).ok for p in completed)
    envy = [] if assignment is None else verify_envy_free(assignment, completed).violations
    return DuelReport(transcript, assignment, verdict, budget_exhausted, completed,
                      mismatches, virtual, envy, hungry)


def complete(state: AdversaryState) -> list[TwoPiecePreference]:
    return state.complete()


Protocol = Callable[[QueryOracle, Sequence[int]], Assignment]


def duel(protocol: Protocol, n: int, group_sizes: Sequence[int], max_queries: int = 1000,
         check: bool = True, state: Optional[AdversaryState] = None) -> DuelReport:
    """Run ``protocol`` against the adversary and judge its output.

    Pass a fresh ``state`` to inspect the known intervals afterwards.
    """
    group_sizes = tuple(group_sizes)
    if len(group_sizes) != 2 or sum(group_sizes) != n or min(group_sizes) < 2:
        raise ValueError(f"group sizes {group_sizes} for n = {n}: need two groups of at least two")
    state = state if state is not None else AdversaryState(n)
    if state.n != n or len(state.history) != 1:
        raise ValueError("the adversary state must be fresh and sized for n players")
    oracle = AdversaryOracle(state, max_queries, check=check)
    try:
        assignment = protocol(oracle, group_sizes)
    except QueryBudgetExceeded:
        return _report(state, oracle.transcript, None, None, [], budget_exhausted=True)
    assignment.check_sizes(group_sizes)
    return finalize(state, oracle.transcript, assignment)


# ---------------------------------------------------------------------------
# Would-be protocols for the adversary to defeat.

def _group_from_answers(answers: Sequence[Side], k1: int) -> list[int]:
    order = sorted(range(len(answers)), key=lambda i: ({Side.LEFT: 0, Side.BOTH: 1, Side.RIGHT: 2}[answers[i]], i))
    return order[:k1]


def _feasible(answers: Sequence[Side], sizes) -> bool:
    return (sum(a is Side.LEFT for a in answers) <= sizes[0]
            and sum(a is Side.RIGHT for a in answers) <= sizes[1])


def marks_protocol(oracle: QueryOracle, sizes) -> Assignment:
    """The monotone mark protocol applied blindly to arbitrary players."""
    n, k1 = oracle.n, sizes[0]
    marks = [oracle.first_indifference(i) for i in range(n)]
    order = sorted(range(n), key=lambda i: (marks[i], i))
    y = (marks[order[k1 - 1]] + marks[order[k1]]) / 2
    return _two_groups(y, order[:k1], n)


def binary_search_protocol(oracle: QueryOracle, sizes) -> Assignment:
    """Bisect on the number of players wanting only the left piece, stopping inside the budget."""
    n, k1 = oracle.n, sizes[0]
    lo, hi = Fraction(0), Fraction(1)
    y, answers = Fraction(1, 2), None
    while oracle.queries_left is None or oracle.queries_left >= n:
        y = (lo + hi) / 2
        answers = [oracle.evaluate(i, y) for i in range(n)]
        if _feasible(answers, sizes):
            break
        if sum(a is Side.LEFT for a in answers) > k1:
            hi = y
        else:
            lo = y
        if oracle.queries_left is None and len(oracle.transcript) >= 100 * n:
            break
    group1 = list(range(k1)) if answers is None else _group_from_answers(answers, k1)
    return _two_groups(y, group1, n)


def random_prober(seed: int = 0) -> Protocol:
    """Evaluate everybody at random points until the answers admit a grouping."""

    def protocol(oracle: QueryOracle, sizes) -> Assignment:
        rng = random.Random(seed)
        n, k1 = oracle.n, sizes[0]
        y, answers = Fraction(1, 2), None
        budget = oracle.queries_left if oracle.queries_left is not None else 100 * n
        for _ in range(budget // n):
            y = Fraction(rng.random())
            answers = [oracle.evaluate(i, y) for i in range(n)]
            if _feasible(answers, sizes):
                break
        group1 = list(range(k1)) if answers is None else _group_from_answers(answers, k1)
        return _two_groups(y, group1, n)

    return protocol


def indifference_walker(oracle: QueryOracle, sizes) -> Assignment:
    """Walk player 0's indifference points left to right, checking everybody at each."""
    n, k1 = oracle.n, sizes[0]
    x, answers, y = Fraction(0), None, Fraction(1, 2)
    while oracle.queries_left is None or oracle.queries_left >= n + 1:
        nxt = oracle.next_indifference(0, x)
        if nxt is None or nxt >= 1:
            break
        y = nxt
        answers = [oracle.evaluate(i, y) for i in range(n)]
        if _feasible(answers, sizes):
            break
        x = y + (1 - y) / 1000
        if oracle.queries_left is None and len(oracle.transcript) >= 100 * n:
            break
    group1 = list(range(k1)) if answers is None else _group_from_answers(answers, k1)
    return _two_groups(y, group1, n)


def fixed_cut(y) -> Protocol:
    """Ask nothing and cut at ``y``, lowest indices on the left."""

    def protocol(oracle: QueryOracle, sizes) -> Assignment:
        return _two_groups(Fraction(y), range(sizes[0]), oracle.n)

    return protocol


BUILTIN_PROTOCOLS = {
    "marks": lambda seed: marks_protocol,
    "binary-search": lambda seed: binary_search_protocol,
    "random-prober": random_prober,
    "indifference-walker": lambda seed: indifference_walker,
    "fixed-cut": lambda seed: fixed_cut(Fraction(1, 2)),
}


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function given by its knots."""

    xs: tuple
    ys: tuple

    def __call__(self, x):
        x = Fraction(x)
        k = bisect.bisect_right(self.xs, x) - 1
        if k >= len(self.xs) - 1:
            return self.ys[-1]
        x0, x1, y0, y1 = self.xs[k], self.xs[k + 1], self.ys[k], self.ys[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def demand_side(self, x) -> Side:
        """Preferred side at cut ``x`` when the left piece is worth ``U(x)`` and the right ``1 - U(x)``."""
        u = self(x)
        half = Fraction(1, 2)
        if u == half:
            return Side.BOTH
        return Side.LEFT if u > half else Side.RIGHT

    def crossings(self, level=Fraction(1, 2)) -> list:
        """Points where the function passes through ``level`` with a sign change."""
        out = []
        signs = [(y > level) - (y < level) for y in self.ys]
        for k, (x, s) in enumerate(zip(self.xs, signs)):
            if s == 0 and 0 < k < len(self.xs) - 1 and signs[k - 1] * signs[k + 1] < 0:
                out.append(x)
        for k in range(len(self.xs) - 1):
            if signs[k] * signs[k + 1] < 0:
                y0, y1 = self.ys[k], self.ys[k + 1]
                out.append(self.xs[k] + (self.xs[k + 1] - self.xs[k]) * (level - y0) / (y1 - y0))
        return sorted(out)

    def densities(self) -> tuple:
        return tuple((y1 - y0) / (x1 - x0) for x0, x1, y0, y1
                     in zip(self.xs, self.xs[1:], self.ys, self.ys[1:]))


def additive_representation(p: TwoPiecePreference) -> PiecewiseLinear:
    """Cumulative utility ``U`` with ``U(0) = 0``, ``U(1) = 1`` realising ``p``.

    ``U`` equals 1/2 at each indifference point, dips to 1/4 in the middle
    of every right-preferred stretch and rises to 3/4 in the middle of every
    left-preferred one.  Its slopes are the (signed) density.
    """
    if not p.is_hungry:
        raise ValueError("only hungry preferences have such a representation")
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    bps = [Fraction(b) for b in p.breakpoints]
    xs, ys = [], []
    for k, (a, b, lab) in enumerate(zip(bps, bps[1:], p.labels)):
        xs.append(a)
        ys.append(Fraction(0) if k == 0 else half)
        xs.append((a + b) / 2)
        ys.append(half + quarter if lab is Side.LEFT else half - quarter)
    xs.append(Fraction(1))
    ys.append(Fraction(1))
    return PiecewiseLinear(tuple(xs), tuple(ys))
