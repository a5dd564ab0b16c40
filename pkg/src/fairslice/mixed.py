"""Mixed cakes: signed additive utilities and two collections of pieces.

Preferences here are always computed from the utility of the physical
point set a collection covers, so partitions that describe the same split
of the cake are rated the same way.

Searches run over cut positions on the uniform grid ``k / resolution``.
Only alternating side labels are enumerated: giving two neighbouring
intervals the same side is the same collection with one cut fewer, which
the search has already visited at the smaller cut count.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from fairslice.core import (
    AdditivePiecewiseConstant, TwoPiecePreference, additive_demand, two_piece_partition,
)

SIDES = ("A", "B")


class SearchBudgetExceeded(RuntimeError):
    pass


class NoHalvingFound(RuntimeError):
    pass


@dataclass(frozen=True)
class PieceCollection:
    """Cuts in ``(0, 1)`` and, for each of the resulting intervals, the collection (A or B) it joins."""

    cuts: tuple
    side_labels: tuple

    def __post_init__(self):
        cuts = tuple(self.cuts)
        labels = tuple(self.side_labels)
        if any(not 0 < c < 1 for c in cuts) or any(a >= b for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"cuts must be strictly increasing inside (0, 1): {cuts}")
        if len(labels) != len(cuts) + 1 or any(s not in SIDES for s in labels):
            raise ValueError(f"need one label from {SIDES} per interval")
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "side_labels", labels)

    @classmethod
    def alternating(cls, cuts: Sequence, first: str = "A") -> "PieceCollection":
        other = "B" if first == "A" else "A"
        return cls(tuple(cuts), tuple(first if k % 2 == 0 else other for k in range(len(cuts) + 1)))

    @property
    def cut_count(self) -> int:
        return len(self.cuts)

    def intervals(self, side: Optional[str] = None) -> list:
        pts = (0, *self.cuts, 1)
        return [(a, b) for a, b, s in zip(pts, pts[1:], self.side_labels) if side is None or s == side]

    def utility(self, u: AdditivePiecewiseConstant, side: str):
        return sum(u.value(a, b) for a, b in self.intervals(side))

    def to_json(self) -> dict:
        return {"cuts": [float(c) for c in self.cuts], "side_labels": list(self.side_labels)}


def gen_counterexample(n: int) -> list[AdditivePiecewiseConstant]:
    """Player ``i`` (0-based) has total utility ``+1`` (even ``i``) or ``-1`` (odd ``i``),
    spread uniformly over ``[i/n, (i+1)/n]``, and nothing elsewhere."""
    if n < 4:
        raise ValueError("the construction needs n >= 4")
    players = []
    for i in range(n):
        sign = 1 if i % 2 == 0 else -1
        edges = [k / n for k in range(n + 1)]
        densities = [sign * n if k == i else 0 for k in range(n)]
        players.append(AdditivePiecewiseConstant.from_edges(edges, densities))
    return players


@dataclass
class CollectionReport:
    ok: bool
    utilities: list  # (utility of A, utility of B) per player
    preferences: list  # set of preferred sides per player
    grouping: Optional[tuple]  # (players on A, players on B)

    def __bool__(self):
        return self.ok


def verify_collection_ef(collection: PieceCollection, utilities: Sequence[AdditivePiecewiseConstant],
                         sizes: Sequence[int], tol: float = 1e-9) -> CollectionReport:
    """Is there a grouping with ``sizes[0]`` players on A and ``sizes[1]`` on B that nobody envies?"""
    k1, k2 = sizes
    if k1 + k2 != len(utilities):
        raise ValueError(f"sizes {tuple(sizes)} for {len(utilities)} players")
    utils, prefs = [], []
    for u in utilities:
        a, b = collection.utility(u, "A"), collection.utility(u, "B")
        utils.append((a, b))
        if abs(a - b) <= tol:
            prefs.append({"A", "B"})
        else:
            prefs.append({"A"} if a > b else {"B"})
    only_a = [i for i, p in enumerate(prefs) if p == {"A"}]
    only_b = [i for i, p in enumerate(prefs) if p == {"B"}]
    flexible = [i for i, p in enumerate(prefs) if len(p) == 2]
    if len(only_a) > k1 or len(only_b) > k2:
        return CollectionReport(False, utils, prefs, None)
    group_a = sorted(only_a + flexible[: k1 - len(only_a)])
    group_b = sorted(set(range(len(utilities))) - set(group_a))
    return CollectionReport(True, utils, prefs, (tuple(group_a), tuple(group_b)))


def single_cut_supporters(utilities: Sequence[AdditivePiecewiseConstant], cut) -> tuple[list, list]:
    """Players preferring the left / right piece of a single cut."""
    left, right = [], []
    x = two_piece_partition(cut)
    for i, u in enumerate(utilities):
        d = additive_demand(u, x)
        if 0 in d:
            left.append(i)
        if 1 in d:
            right.append(i)
    return left, right


def physically_consistent(p: TwoPiecePreference) -> bool:
    """Cutting at 0 and at 1 both split the cake into everything and nothing;
    the player must prefer the same physical part either way."""
    return p.eval(0).swapped() is p.eval(1)


# ---------------------------------------------------------------------------
# grid searches

def _cumulative_table(utilities, resolution: int) -> np.ndarray:
    grid = np.arange(resolution + 1) / resolution
    return np.array([[u.cumulative(float(t)) for t in grid] for u in utilities])


@dataclass
class SearchOutcome:
    cut_count: int
    examined: int
    found: Optional[PieceCollection]


@dataclass
class CutSearchResult:
    solution: Optional[PieceCollection]
    grouping: Optional[tuple]
    outcomes: list = field(default_factory=list)

    def outcomes_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["cuts", "placements_examined", "found", "solution_cuts", "solution_labels"])
        for o in self.outcomes:
            w.writerow([o.cut_count, o.examined, o.found is not None,
                        "" if o.found is None else " ".join(f"{c:.12g}" for c in o.found.cuts),
                        "" if o.found is None else "".join(o.found.side_labels)])
        return buf.getvalue()


def _alternating_diffs(F: np.ndarray, prefix_idx: Sequence[int], last: np.ndarray) -> np.ndarray:
    """``u(A) - u(B)`` per player for alternating labels starting with A.

    ``F`` is the cumulative table, ``prefix_idx`` fixed cut indices and ``last``
    a vector of candidate positions for the final cut.  Returns an array of
    shape (players, candidates).
    """
    # sum_k (-1)^k (F(t_{k+1}) - F(t_k)) telescopes to
    # 2 sum_k (-1)^(k-1) F(t_k) + (-1)^c F(1)
    acc = np.zeros((F.shape[0], 1))
    sign = 1.0
    for t in prefix_idx:
        acc = acc + 2 * sign * F[:, t:t + 1]
        sign = -sign
    acc = acc + 2 * sign * F[:, last]
    sign = -sign
    return acc + sign * F[:, -1:]


def _positions(resolution: int, cut_count: int):
    """Lexicographic prefixes (all but the last cut) and the admissible range for the last cut."""
    if cut_count == 0:
        yield (), None
        return
    for prefix in itertools.combinations(range(1, resolution), cut_count - 1):
        start = prefix[-1] + 1 if prefix else 1
        if start <= resolution - 1:
            yield prefix, np.arange(start, resolution)


def _diffs_for(F, prefix, last):
    if last is None:
        return F[:, -1:].copy()
    return _alternating_diffs(F, prefix, last)


def min_cut_search(utilities: Sequence[AdditivePiecewiseConstant], sizes: Sequence[int], max_cuts: int,
                   grid_resolution: Optional[int] = None, tol: float = 1e-9,
                   max_placements: int = 50_000_000) -> CutSearchResult:
    """Fewest grid cuts admitting an envy-free collection for groups of ``sizes``.

    Cut counts ``0, 1, ..., max_cuts`` are tried in order; within a count the
    lexicographically smallest placement (A before B as the first label) wins.
    Absence is evidence on this grid only.
    """
    k1, k2 = sizes
    n = len(utilities)
    if k1 + k2 != n:
        raise ValueError(f"sizes {tuple(sizes)} for {n} players")
    R = grid_resolution or 40 * n
    total = sum(math.comb(R - 1, c) for c in range(max_cuts + 1))
    if total > max_placements:
        raise SearchBudgetExceeded(f"{total} placements exceed the budget of {max_placements}")
    F = _cumulative_table(utilities, R)
    result = CutSearchResult(None, None)
    for c in range(max_cuts + 1):
        examined, found = 0, None
        for prefix, last in _positions(R, c):
            diff = _diffs_for(F, prefix, last)
            examined += diff.shape[1]
            for first, sgn in (("A", 1.0), ("B", -1.0)):
                d = sgn * diff  # u(first side) - u(other side)
                only_first = (d > tol).sum(axis=0)
                only_other = (d < -tol).sum(axis=0)
                cap_first, cap_other = (k1, k2) if first == "A" else (k2, k1)
                ok = np.nonzero((only_first <= cap_first) & (only_other <= cap_other))[0]
                if ok.size:
                    idx = [*prefix] + ([] if last is None else [int(last[ok[0]])])
                    found = PieceCollection.alternating([i / R for i in idx], first)
                    break
            if found:
                break
        result.outcomes.append(SearchOutcome(c, examined, found))
        if found:
            report = verify_collection_ef(found, utilities, sizes, tol)
            result.solution, result.grouping = found, report.grouping
            break
    return result


def consensus_halving_grid(utilities: Sequence[AdditivePiecewiseConstant], n_cuts: int, eps: float,
                           grid_resolution: int) -> PieceCollection:
    """Collection in which every player values A and B within ``eps`` of each other.

    Uses as few cuts as possible on the grid, up to ``n_cuts``.  For each cut
    count the search first tries the subgrids ``grid_resolution / 2^k`` (their
    points are grid points too) and only then the full grid, depth-first and
    left to right.  A branch is abandoned once some player's imbalance so far
    exceeds ``eps`` plus everything the rest of the cake could still correct
    (the player's total absolute utility to the right of the last cut).
    """
    R = grid_resolution
    total = np.array([float(u.total) for u in utilities])
    if np.all(np.abs(total) <= eps):
        return PieceCollection((), ("A",))
    tables = [_halving_tables(utilities, r) for r in _subgrids(R)]
    for c in range(1, n_cuts + 1):
        for r, (F, tail) in zip(_subgrids(R), tables):
            found = _halving_dfs(F, tail, F[:, -1], r, c, eps)
            if found is not None:
                return PieceCollection.alternating([i / r for i in found], "A")
    raise NoHalvingFound(f"no {eps}-halving with at most {n_cuts} cuts on grid 1/{R}")


def _subgrids(resolution: int) -> list:
    out = [resolution]
    while out[0] % 2 == 0 and out[0] > 2:
        out.insert(0, out[0] // 2)
    return out


def _halving_tables(utilities, resolution: int):
    F = _cumulative_table(utilities, resolution)
    grid = np.arange(resolution + 1) / resolution
    # absolute utility of [t, 1] per player, at every grid point
    tail = []
    for u in utilities:
        abs_u = AdditivePiecewiseConstant(tuple((s, e, abs(d)) for s, e, d in u.blocks))
        tail.append([abs_u.total - abs_u.cumulative(float(t)) for t in grid])
    return F, np.array(tail)


def _halving_dfs(F, tail, total, R, cuts, eps):
    # partial: u(A) - u(B) over [0, t] for the cuts placed so far; the interval
    # ending at the next cut carries sign `sign`
    def rec(prefix, partial, sign, start, remaining):
        if remaining == 1:
            last = np.arange(start, R)
            if last.size == 0:
                return None
            # add interval [t_prev, t_last] with `sign` and the tail [t_last, 1] with -sign
            d = (partial[:, None] + sign * (F[:, last] - F[:, [prefix[-1] if prefix else 0]])
                 - sign * (total[:, None] - F[:, last]))
            ok = np.nonzero(np.all(np.abs(d) <= eps, axis=0))[0]
            return None if ok.size == 0 else (*prefix, int(last[ok[0]]))
        prev = prefix[-1] if prefix else 0
        for t in range(start, R - remaining + 1):
            p = partial + sign * (F[:, t] - F[:, prev])
            if np.any(np.abs(p) - tail[:, t] > eps):
                continue
            got = rec((*prefix, t), p, -sign, t + 1, remaining - 1)
            if got is not None:
                return got
        return None

    return rec((), np.zeros(F.shape[0]), 1.0, 1, cuts)


@dataclass
class HalvingPick:
    collection: PieceCollection
    picker_side: str
    report: CollectionReport


def halving_then_pick(utilities: Sequence[AdditivePiecewiseConstant], eps: float,
                      grid_resolution: int, sizes: Optional[Sequence[int]] = None) -> HalvingPick:
    """Halve for all players but the last (at most ``n - 1`` cuts) and let the last one pick.

    Groups default to ``(n - 1, 1)``; the picker takes the singleton group's side.
    """
    n = len(utilities)
    sizes = tuple(sizes) if sizes is not None else (n - 1, 1)
    coll = consensus_halving_grid(utilities[:-1], n - 1, eps, grid_resolution)
    last = utilities[-1]
    a, b = coll.utility(last, "A"), coll.utility(last, "B")
    picked = "A" if a >= b else "B"
    single = "B" if sizes[1] == 1 else "A"
    if picked != single:
        coll = PieceCollection(coll.cuts, tuple("B" if s == "A" else "A" for s in coll.side_labels))
    report = verify_collection_ef(coll, utilities, sizes, tol=eps)
    return HalvingPick(coll, single, report)


def utility_table_csv(collection: PieceCollection, utilities: Sequence[AdditivePiecewiseConstant]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["player", "utility_A", "utility_B"])
    for i, u in enumerate(utilities):
        w.writerow([i, f"{collection.utility(u, 'A'):.12g}", f"{collection.utility(u, 'B'):.12g}"])
    return buf.getvalue()
