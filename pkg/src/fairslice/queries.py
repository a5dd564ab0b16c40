"""Indifference-point queries over two-piece preferences, with transcripts.

A protocol talks to players only through a :class:`QueryOracle`.  The
oracle answers Evaluate, Next-indifference and Previous-indifference
queries (First-indifference is Next-indifference at 0), enforces an
optional query budget and records every exchange in a
:class:`QueryTranscript`.
"""

from __future__ import annotations

import bisect
import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, TextIO

from fairslice.core import Side, TwoPiecePreference


class QueryKind(enum.Enum):
    EVALUATE = "evaluate"
    NEXT = "next_indifference"
    PREVIOUS = "previous_indifference"
    FIRST = "first_indifference"


class NotHungryError(ValueError):
    """Raised when a preference does not prefer only the right piece at 0 and only the left at 1."""


class QueryBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Query:
    kind: QueryKind
    player: int
    point: object = None

    def __post_init__(self):
        if self.kind is QueryKind.FIRST:
            if self.point is not None:
                raise ValueError("first-indifference queries take no point")
        elif self.point is None or not 0 <= self.point <= 1:
            raise ValueError(f"query point {self.point!r} outside [0, 1]")


def evaluate(p: TwoPiecePreference, x) -> Side:
    return p.eval(x)


def next_indifference(p: TwoPiecePreference, x):
    """Smallest indifference point ``>= x``, or ``None``."""
    if not 0 <= x <= 1:
        raise ValueError(f"query point {x!r} outside [0, 1]")
    sw = p.switch_points
    k = bisect.bisect_left(sw, x)
    return sw[k] if k < len(sw) else None


def previous_indifference(p: TwoPiecePreference, x):
    """Largest indifference point ``<= x``, or ``None``."""
    if not 0 <= x <= 1:
        raise ValueError(f"query point {x!r} outside [0, 1]")
    sw = p.switch_points
    k = bisect.bisect_right(sw, x)
    return sw[k - 1] if k else None


def first_indifference(p: TwoPiecePreference):
    """Leftmost indifference point; equals the leftmost point where the left piece is preferred."""
    if not p.is_hungry:
        raise NotHungryError(f"preference {p.labels} is not hungry")
    return next_indifference(p, 0)


def answer_query(p: TwoPiecePreference, query: Query):
    if query.kind is QueryKind.EVALUATE:
        return evaluate(p, query.point)
    if query.kind is QueryKind.NEXT:
        return next_indifference(p, query.point)
    if query.kind is QueryKind.PREVIOUS:
        return previous_indifference(p, query.point)
    return first_indifference(p)


def next_left_preferred(p: TwoPiecePreference, x):
    """Smallest ``y >= x`` at which the left piece is preferred."""
    return PreferenceOracle([p]).next_left_preferred(0, x)


def _answer_to_json(answer):
    if isinstance(answer, Side):
        return answer.value
    if answer is None:
        return None
    return float(answer)


def _answer_from_json(kind: QueryKind, raw):
    if kind is QueryKind.EVALUATE:
        return Side(raw)
    return None if raw is None else raw


@dataclass
class QueryTranscript:
    """Append-only log of ``(query, answer)`` pairs with per-player, per-kind counters."""

    entries: list = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)

    def record(self, query: Query, answer) -> "QueryTranscript":
        self.entries.append((query, answer))
        self.counts[(query.player, query.kind)] += 1
        return self

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def count(self, player: Optional[int] = None, kind: Optional[QueryKind] = None) -> int:
        return sum(
            c for (p, k), c in self.counts.items()
            if (player is None or p == player) and (kind is None or k is kind)
        )

    def replay(self, answer: Callable[[Query], object]) -> list:
        """Re-ask every query; return the entries whose answer differs."""
        mismatches = []
        for query, expected in self.entries:
            got = answer(query)
            if got != expected:
                mismatches.append((query, expected, got))
        return mismatches

    def to_jsonl(self) -> str:
        lines = []
        for q, a in self.entries:
            rec = {"player": q.player, "kind": q.kind.value,
                   "point": None if q.point is None else float(q.point),
                   "answer": _answer_to_json(a)}
            lines.append(json.dumps(rec))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_jsonl(cls, text: str) -> "QueryTranscript":
        t = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            kind = QueryKind(rec["kind"])
            t.record(Query(kind, rec["player"], rec["point"]), _answer_from_json(kind, rec["answer"]))
        return t


class QueryOracle:
    """Query interface shared by real players, interactive prompts and the adversary.

    Subclasses implement :meth:`_answer`.  Every query goes through
    :meth:`ask`, which enforces the budget and records the transcript.
    """

    def __init__(self, n: int, max_queries: Optional[int] = None):
        self.n = n
        self.max_queries = max_queries
        self.transcript = QueryTranscript()

    @property
    def queries_left(self) -> Optional[int]:
        if self.max_queries is None:
            return None
        return self.max_queries - len(self.transcript)

    def ask(self, query: Query):
        if not 0 <= query.player < self.n:
            raise IndexError(f"no player {query.player}")
        if self.max_queries is not None and len(self.transcript) >= self.max_queries:
            raise QueryBudgetExceeded(f"query budget of {self.max_queries} exhausted")
        answer = self._answer(query)
        self.transcript.record(query, answer)
        return answer

    def _answer(self, query: Query):
        raise NotImplementedError

    def evaluate(self, player: int, x) -> Side:
        return self.ask(Query(QueryKind.EVALUATE, player, x))

    def next_indifference(self, player: int, x):
        return self.ask(Query(QueryKind.NEXT, player, x))

    def previous_indifference(self, player: int, x):
        return self.ask(Query(QueryKind.PREVIOUS, player, x))

    def first_indifference(self, player: int):
        return self.ask(Query(QueryKind.FIRST, player))

    def next_left_preferred(self, player: int, x):
        """Derived query: Evaluate at ``x``, then Next-indifference if the left piece is not preferred."""
        if self.evaluate(player, x).includes(Side.LEFT):
            return x
        return self.next_indifference(player, x)


class PreferenceOracle(QueryOracle):
    """Answers queries from known two-piece preferences."""

    def __init__(self, preferences: Sequence[TwoPiecePreference], max_queries: Optional[int] = None):
        super().__init__(len(preferences), max_queries)
        self.preferences = list(preferences)

    def _answer(self, query: Query):
        return answer_query(self.preferences[query.player], query)


class PromptOracle(QueryOracle):
    """Asks a human at a terminal; answers are ``L``/``R``/``B`` or a number / ``none``."""

    def __init__(self, n: int, stdin: TextIO, stdout: TextIO, max_queries: Optional[int] = None):
        super().__init__(n, max_queries)
        self.stdin = stdin
        self.stdout = stdout

    def _answer(self, query: Query):
        where = "" if query.point is None else f" at {float(query.point)}"
        self.stdout.write(f"player {query.player}, {query.kind.value}{where}? ")
        self.stdout.flush()
        raw = self.stdin.readline().strip()
        if query.kind is QueryKind.EVALUATE:
            return Side(raw.upper())
        if raw.lower() in ("", "none"):
            if query.kind is QueryKind.FIRST:
                raise NotHungryError("a hungry player always has a first indifference point")
            return None
        value = Fraction(raw)
        if not 0 <= value <= 1:
            raise ValueError(f"answer {raw!r} outside [0, 1]")
        return value
