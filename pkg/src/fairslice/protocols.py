"""Finite two-group protocols and the envy-freeness check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from fairslice.core import Assignment, Partition, two_piece_partition
from fairslice.queries import QueryOracle, QueryTranscript


class NotMonotoneError(ValueError):
    pass


@dataclass
class ProtocolReport:
    assignment: Assignment
    transcript: QueryTranscript

    @property
    def query_count(self) -> int:
        return len(self.transcript)

    @property
    def cut(self):
        return self.assignment.partition.lengths[0]

    def to_json(self) -> dict:
        return {
            "cut": float(self.cut),
            "partition": [float(v) for v in self.assignment.partition.lengths],
            "groups": [sorted(g) for g in self.assignment.groups],
            "query_count": self.query_count,
            "queries": [
                {"player": q.player, "kind": q.kind.value,
                 "point": None if q.point is None else float(q.point),
                 "answer": a.value if hasattr(a, "value") else (None if a is None else float(a))}
                for q, a in self.transcript
            ],
        }


def _two_groups(cut, group1: Sequence[int], n: int) -> Assignment:
    g1 = frozenset(group1)
    return Assignment(two_piece_partition(cut), (g1, frozenset(range(n)) - g1))


def singleton_first(oracle: QueryOracle) -> ProtocolReport:
    """One player alone on the left piece.

    Ask every player for the first indifference point and cut at the smallest
    answer.  The player who gave it prefers the left piece there; everyone
    else still prefers the right piece at any point up to their own answer.
    Ties go to the lowest index.
    """
    answers = [oracle.first_indifference(i) for i in range(oracle.n)]
    winner = min(range(oracle.n), key=lambda i: (answers[i], i))
    return ProtocolReport(_two_groups(answers[winner], [winner], oracle.n), oracle.transcript)


def singleton_last(oracle: QueryOracle) -> ProtocolReport:
    """Mirror of :func:`singleton_first`: one player alone on the right piece."""
    answers = [oracle.previous_indifference(i, 1) for i in range(oracle.n)]
    if any(a is None for a in answers):
        raise ValueError("a hungry player always has an indifference point below 1")
    winner = max(range(oracle.n), key=lambda i: (answers[i], -i))
    group1 = [i for i in range(oracle.n) if i != winner]
    return ProtocolReport(_two_groups(answers[winner], group1, oracle.n), oracle.transcript)


def monotone_marks(oracle: QueryOracle, k1: int) -> ProtocolReport:
    """Mark protocol for monotone players and any group sizes ``(k1, n - k1)``.

    Each player's mark is their unique indifference point.  Monotonicity is
    confirmed through the oracle (first and last indifference points
    coincide) rather than by inspecting the preference.
    """
    n = oracle.n
    if not 1 <= k1 <= n - 1:
        raise ValueError(f"k1 = {k1} must lie in [1, {n - 1}]")
    marks = []
    for i in range(n):
        first = oracle.first_indifference(i)
        last = oracle.previous_indifference(i, 1)
        if first != last:
            raise NotMonotoneError(f"player {i} has indifference points {first} and {last}")
        marks.append(first)
    order = sorted(range(n), key=lambda i: (marks[i], i))
    y = (marks[order[k1 - 1]] + marks[order[k1]]) / 2
    return ProtocolReport(_two_groups(y, order[:k1], n), oracle.transcript)


@dataclass
class EnvyReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def verify_envy_free(assignment: Assignment, prefs: Sequence) -> EnvyReport:
    """Every player in group ``j`` must have piece ``j`` in their demand set.

    ``violations`` lists ``(player, group)`` pairs.
    """
    if assignment.n != len(prefs):
        raise ValueError(f"{len(prefs)} preferences for {assignment.n} assigned players")
    bad = []
    for j, group in enumerate(assignment.groups):
        for i in sorted(group):
            if j not in prefs[i](assignment.partition):
                bad.append((i, j))
    bad.sort()
    return EnvyReport(not bad, bad)


def envy_free_grouping(partition: Partition, prefs: Sequence, group_sizes: Sequence[int]):
    """Find groups of the given sizes making ``partition`` envy-free, or ``None``.

    Two pieces only: players wanting just one side are forced, the rest fill up.
    """
    if partition.m != 2:
        raise NotImplementedError("grouping search is for two pieces")
    demands = [prefs[i](partition) for i in range(len(prefs))]
    only_left = [i for i, d in enumerate(demands) if d == {0}]
    only_right = [i for i, d in enumerate(demands) if d == {1}]
    both = [i for i, d in enumerate(demands) if d == {0, 1}]
    k1, k2 = group_sizes
    if len(only_left) > k1 or len(only_right) > k2:
        return None
    g1 = only_left + both[: k1 - len(only_left)]
    return Assignment(partition, (frozenset(g1), frozenset(range(len(prefs))) - frozenset(g1)))
