"""Partitions, assignments and the preference representations used everywhere else.

Pieces and players are indexed from 0.  A partition of the cake ``[0, 1]``
into ``m`` contiguous pieces is stored by the piece lengths, left to right.
Demand functions are plain callables ``Partition -> frozenset[int]``.
"""

from __future__ import annotations

import bisect
import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

# internal simplex membership vs. user-supplied input
SIMPLEX_TOL = 1e-12
INPUT_TOL = 1e-9
# utilities closer than this count as a tie
TIE_TOL = 1e-12

DemandFunction = Callable[["Partition"], frozenset]


class Side(enum.Enum):
    """Answer of a two-piece preference at a cut point."""

    LEFT = "L"
    RIGHT = "R"
    BOTH = "B"

    @property
    def pieces(self) -> frozenset:
        return _SIDE_PIECES[self]

    def swapped(self) -> "Side":
        return {Side.LEFT: Side.RIGHT, Side.RIGHT: Side.LEFT, Side.BOTH: Side.BOTH}[self]

    def includes(self, other: "Side") -> bool:
        return self is other or self is Side.BOTH

    @classmethod
    def from_pieces(cls, pieces: Iterable[int]) -> "Side":
        pieces = frozenset(pieces)
        for side, ps in _SIDE_PIECES.items():
            if ps == pieces:
                return side
        raise ValueError(f"not a two-piece demand: {sorted(pieces)}")


_SIDE_PIECES = {
    Side.LEFT: frozenset({0}),
    Side.RIGHT: frozenset({1}),
    Side.BOTH: frozenset({0, 1}),
}


class InvalidPartition(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Lengths of ``m`` contiguous pieces of ``[0, 1]``, a point of the standard simplex."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if not lengths:
            raise InvalidPartition("a partition needs at least one piece")
        if any(v < 0 for v in lengths):
            raise InvalidPartition(f"negative piece length in {lengths}")
        if abs(sum(lengths) - 1) > SIMPLEX_TOL:
            raise InvalidPartition(f"lengths sum to {sum(lengths)!r}, not 1")

    @classmethod
    def from_cuts(cls, cuts: Sequence) -> "Partition":
        points = [0, *cuts, 1]
        return cls(tuple(b - a for a, b in zip(points, points[1:])))

    @property
    def m(self) -> int:
        return len(self.lengths)

    @property
    def cuts(self) -> tuple:
        """Interior cut points ``c_1 <= ... <= c_{m-1}``."""
        return tuple(itertools.accumulate(self.lengths[:-1]))

    @property
    def cut_points(self) -> tuple:
        return (0, *self.cuts, 1)

    def intervals(self) -> list[tuple]:
        pts = self.cut_points
        return list(zip(pts, pts[1:]))

    @property
    def empty_pieces(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.lengths) if v == 0)

    @property
    def nonempty_pieces(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.lengths) if v > 0)

    def __len__(self):
        return len(self.lengths)

    def __iter__(self):
        return iter(self.lengths)


def validate_partition(lengths: Iterable) -> Partition:
    """Check user-supplied lengths and return them normalised to sum exactly to one.

    >>> validate_partition([0.3, 0.7]).lengths
    (0.3, 0.7)
    >>> validate_partition([0.5, 0.6])
    Traceback (most recent call last):
    ...
    fairslice.core.InvalidPartition: lengths sum to 1.1, which is not 1 within 1e-09
    """
    lengths = tuple(lengths)
    if not lengths:
        raise InvalidPartition("a partition needs at least one piece")
    if any(v < 0 for v in lengths):
        raise InvalidPartition(f"negative piece length in {lengths}")
    total = sum(lengths)
    if abs(total - 1) > INPUT_TOL:
        raise InvalidPartition(f"lengths sum to {total!r}, which is not 1 within {INPUT_TOL}")
    if total != 1:
        lengths = tuple(v / total for v in lengths)
    return Partition(lengths)


def two_piece_partition(cut) -> Partition:
    return Partition((cut, 1 - cut))


def merge_adjacent(x: Partition, group_sizes: Sequence[int]) -> Partition:
    """Unite consecutive runs of pieces: run ``j`` has ``group_sizes[j]`` pieces.

    >>> merge_adjacent(Partition((0.25, 0.25, 0.25, 0.25)), (1, 3)).lengths
    (0.25, 0.75)
    """
    if sum(group_sizes) != x.m or any(k <= 0 for k in group_sizes):
        raise ValueError(f"group sizes {tuple(group_sizes)} do not split {x.m} pieces")
    merged, start = [], 0
    for k in group_sizes:
        merged.append(sum(x.lengths[start:start + k]))
        start += k
    return Partition(tuple(merged))


def group_of_piece(group_sizes: Sequence[int]) -> tuple[int, ...]:
    """Map each piece of an ``n``-partition to the run it is merged into."""
    return tuple(j for j, k in enumerate(group_sizes) for _ in range(k))


@dataclass(frozen=True)
class Assignment:
    """A partition plus the division of players into groups; group ``j`` gets piece ``j``."""

    partition: Partition
    groups: tuple

    def __post_init__(self):
        groups = tuple(frozenset(g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        if len(groups) != self.partition.m:
            raise ValueError(f"{len(groups)} groups for {self.partition.m} pieces")
        members = [p for g in groups for p in g]
        if sorted(members) != list(range(len(members))):
            raise ValueError(f"groups {groups} do not partition the players")

    @property
    def n(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    def group_of(self, player: int) -> int:
        for j, g in enumerate(self.groups):
            if player in g:
                return j
        raise KeyError(player)

    def check_sizes(self, group_sizes: Sequence[int]):
        if self.group_sizes != tuple(group_sizes):
            raise ValueError(f"group sizes {self.group_sizes} differ from {tuple(group_sizes)}")


def canonicalize(breakpoints: Sequence, labels: Sequence[Side]) -> tuple[tuple, tuple]:
    """Drop breakpoints separating two intervals with the same label."""
    bps, labs = [breakpoints[0]], [labels[0]]
    for b, lab in zip(breakpoints[1:-1], labels[1:]):
        if lab is labs[-1]:
            continue
        bps.append(b)
        labs.append(lab)
    bps.append(breakpoints[-1])
    return tuple(bps), tuple(labs)


@dataclass(frozen=True)
class TwoPiecePreference:
    """Finite description of a player's preference over single-cut partitions.

    ``labels[k]`` is the preferred side on the open interval between
    ``breakpoints[k]`` and ``breakpoints[k + 1]``.  At an interior breakpoint
    both sides are preferred (the closure of both neighbouring intervals), so
    the two preference sets are closed by construction.  Breakpoints may be
    floats or :class:`fractions.Fraction`; comparisons stay exact.
    """

    breakpoints: tuple
    labels: tuple

    def __post_init__(self):
        bps = tuple(self.breakpoints)
        labs = tuple(Side(lab) if not isinstance(lab, Side) else lab for lab in self.labels)
        if len(bps) != len(labs) + 1 or not labs:
            raise ValueError("need exactly one label per interval")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError(f"breakpoints not strictly increasing: {bps}")
        if Side.BOTH in labs:
            raise ValueError("interval labels are LEFT or RIGHT; BOTH arises only at switch points")
        bps, labs = canonicalize(bps, labs)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "labels", labs)

    @classmethod
    def alternating(cls, switches: Sequence, first: Side = Side.RIGHT) -> "TwoPiecePreference":
        """Preference switching side at each of the given interior points."""
        labels, side = [], first
        for _ in range(len(switches) + 1):
            labels.append(side)
            side = side.swapped()
        return cls((0, *switches, 1), tuple(labels))

    @property
    def switch_points(self) -> tuple:
        """Interior breakpoints; after canonicalisation each one is an indifference point."""
        return self.breakpoints[1:-1]

    @property
    def is_hungry(self) -> bool:
        return self.labels[0] is Side.RIGHT and self.labels[-1] is Side.LEFT

    @property
    def is_lazy(self) -> bool:
        return self.labels[0] is Side.LEFT and self.labels[-1] is Side.RIGHT

    @property
    def is_monotone(self) -> bool:
        return self.is_hungry and len(self.switch_points) == 1

    def eval(self, x) -> Side:
        """Preferred side(s) when the cake is cut at ``x``."""
        if x < 0 or x > 1:
            raise ValueError(f"cut point {x!r} outside [0, 1]")
        k = bisect.bisect_right(self.breakpoints, x) - 1
        if k >= len(self.labels):
            return self.labels[-1]
        if x == self.breakpoints[k] and k > 0:
            return Side.BOTH
        return self.labels[k]

    def __call__(self, partition: Partition) -> frozenset:
        if partition.m != 2:
            raise ValueError("a two-piece preference only rates 2-partitions")
        return self.eval(partition.lengths[0]).pieces

    def mirrored(self) -> "TwoPiecePreference":
        """Reflect the cake about 1/2, so the left piece becomes the right piece."""
        bps = tuple(1 - b for b in reversed(self.breakpoints))
        labs = tuple(lab.swapped() for lab in reversed(self.labels))
        return TwoPiecePreference(bps, labs)

    def to_json(self) -> dict:
        return {
            "kind": "two_piece",
            "breakpoints": [float(b) for b in self.breakpoints],
            "labels": [lab.value for lab in self.labels],
        }


def two_piece_eval(p: TwoPiecePreference, x) -> Side:
    return p.eval(x)


@dataclass(frozen=True)
class AdditivePiecewiseConstant:
    """Signed, piecewise-constant density on ``[0, 1]``.

    ``blocks`` holds ``(start, end, density)`` triples covering the cake in
    order.  The measure of an interval is the overlap-weighted sum of
    densities.  Arithmetic is generic, so Fraction inputs give exact values.
    """

    blocks: tuple
    _edges: tuple = field(init=False, repr=False, compare=False)
    _prefix: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple((s, e, d) for s, e, d in self.blocks)
        if not blocks:
            raise ValueError("at least one block is required")
        if blocks[0][0] != 0 or blocks[-1][1] != 1:
            raise ValueError("blocks must cover [0, 1]")
        for (s, e, _), nxt in zip(blocks, blocks[1:] + (None,)):
            if not s < e:
                raise ValueError(f"empty or reversed block [{s}, {e}]")
            if nxt is not None and nxt[0] != e:
                raise ValueError(f"blocks not contiguous at {e}")
        prefix = [0]
        for s, e, d in blocks:
            prefix.append(prefix[-1] + (e - s) * d)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_edges", tuple(b[0] for b in blocks) + (1,))
        object.__setattr__(self, "_prefix", tuple(prefix))

    @classmethod
    def from_edges(cls, edges: Sequence, densities: Sequence) -> "AdditivePiecewiseConstant":
        return cls(tuple(zip(edges[:-1], edges[1:], densities)))

    @classmethod
    def uniform(cls, density=1) -> "AdditivePiecewiseConstant":
        return cls(((0, 1, density),))

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def densities(self) -> tuple:
        return tuple(b[2] for b in self.blocks)

    @property
    def total(self):
        return self._prefix[-1]

    def cumulative(self, x):
        """Measure of ``[0, x]``."""
        if x <= 0:
            return 0
        if x >= 1:
            return self._prefix[-1]
        k = bisect.bisect_right(self._edges, x) - 1
        s, _, d = self.blocks[k]
        return self._prefix[k] + (x - s) * d

    def value(self, a, b):
        return self.cumulative(b) - self.cumulative(a)

    def piece_values(self, x: Partition) -> list:
        pts = [self.cumulative(c) for c in x.cut_points]
        return [b - a for a, b in zip(pts, pts[1:])]

    def to_json(self, mode: str = "hungry") -> dict:
        return {
            "kind": "additive_pwc",
            "blocks": [{"start": float(s), "end": float(e), "density": float(d)} for s, e, d in self.blocks],
            "mode": mode,
        }


def _arg_best(values: Sequence, maximize: bool, tol=TIE_TOL) -> frozenset:
    best = max(values) if maximize else min(values)
    return frozenset(j for j, v in enumerate(values) if abs(v - best) <= tol)


def additive_demand(u: AdditivePiecewiseConstant, x: Partition) -> frozenset:
    """Pieces of maximum utility (all of them on a tie)."""
    return _arg_best(u.piece_values(x), maximize=True)


def cost_demand(c: AdditivePiecewiseConstant, x: Partition) -> frozenset:
    """Pieces of minimum cost, the chore counterpart of :func:`additive_demand`."""
    return _arg_best(c.piece_values(x), maximize=False)


@dataclass(frozen=True)
class AdditivePlayer:
    """Demand function induced by a density: ``hungry`` maximises, ``lazy`` minimises."""

    measure: AdditivePiecewiseConstant
    mode: str = "hungry"

    def __post_init__(self):
        if self.mode not in ("hungry", "lazy"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def __call__(self, x: Partition) -> frozenset:
        if self.mode == "hungry":
            return additive_demand(self.measure, x)
        return cost_demand(self.measure, x)

    def to_two_piece(self) -> TwoPiecePreference:
        """Exact breakpoint form of this player's demand on 2-partitions.

        With cumulative measure ``F`` the left piece is better (or cheaper)
        wherever ``2 F(c) - F(1)`` has the right sign.  Roots are found per
        block, so Fraction densities give exact switch points.
        """
        u = self.measure
        sign = 1 if self.mode == "hungry" else -1
        total = u.total

        def g(c):
            return sign * (2 * u.cumulative(c) - total)

        roots = []
        for s, e, d in u.blocks:
            gs, ge = g(s), g(e)
            if gs == 0 and ge == 0:
                raise ValueError(f"player indifferent on the whole interval [{s}, {e}]")
            if gs == 0 and s > 0:
                roots.append(s)
            if (gs < 0 < ge) or (ge < 0 < gs):
                roots.append(s + (e - s) * gs / (gs - ge))
        # label of each open interval between consecutive roots, from its midpoint
        pts = [0, *roots, 1]
        labels = []
        for a, b in zip(pts, pts[1:]):
            v = g((a + b) / 2)
            if v == 0:
                raise ValueError("degenerate tie inside an interval")
            labels.append(Side.LEFT if v > 0 else Side.RIGHT)
        for r, lab0, lab1 in zip(roots, labels, labels[1:]):
            if lab0 is lab1:
                raise ValueError(f"isolated indifference point at {r} without a switch")
        return TwoPiecePreference(tuple(pts), tuple(labels))

    def to_json(self) -> dict:
        return self.measure.to_json(self.mode)


def exact_two_piece(d):
    """Breakpoint form of a two-piece or additive player, computed in Fractions.

    Returns ``None`` for other demand functions.
    """
    if isinstance(d, TwoPiecePreference):
        return d
    if isinstance(d, AdditivePlayer):
        blocks = tuple((Fraction(s), Fraction(e), Fraction(v)) for s, e, v in d.measure.blocks)
        return AdditivePlayer(AdditivePiecewiseConstant(blocks), d.mode).to_two_piece()
    return None


@dataclass
class AssumptionReport:
    ok: bool
    exact: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _grid_partitions(m: int, resolution: int, need_empty: bool = True):
    """All partitions with lengths on the ``1/resolution`` grid."""
    for bars in itertools.combinations_with_replacement(range(resolution + 1), m - 1):
        pts = (0, *bars, resolution)
        counts = [b - a for a, b in zip(pts, pts[1:])]
        if need_empty and all(counts):
            continue
        yield Partition(tuple(Fraction(c, resolution) for c in counts))


def validate_hungry(d, m: int = 2, resolution: int = 20) -> AssumptionReport:
    """Check that no empty piece is ever preferred.

    Exact for two-piece preferences and additive players; other demand
    callables are probed on grid partitions with at least one empty piece.
    """
    if isinstance(d, TwoPiecePreference):
        bad = []
        if Side.LEFT.pieces <= d.eval(0).pieces:
            bad.append((Partition((0, 1)), 0))
        if Side.RIGHT.pieces <= d.eval(1).pieces:
            bad.append((Partition((1, 0)), 1))
        return AssumptionReport(not bad, True, bad)
    if isinstance(d, AdditivePlayer) and d.mode == "hungry":
        # an empty piece (utility 0) is preferred somewhere iff the cake can be
        # cut into at most m-1 pieces of utility <= 0, i.e. iff the total is <= 0
        if d.measure.total > TIE_TOL:
            return AssumptionReport(True, True)
        x = Partition((0,) * (m - 1) + (1,))
        return AssumptionReport(False, True, [(x, 0)])
    bad = []
    for x in _grid_partitions(m, resolution):
        chosen = d(x) & x.empty_pieces
        bad.extend((x, j) for j in sorted(chosen))
    return AssumptionReport(not bad, False, bad)


def validate_lazy(d, m: int = 2, resolution: int = 20) -> AssumptionReport:
    """Check that whenever a piece is empty, exactly the empty pieces are preferred.

    Exact for two-piece preferences and additive cost players.  For ``m`` pieces
    the nonempty pieces of such a partition are up to ``m - 1`` contiguous
    intervals; each must cost strictly more than nothing.
    """
    if isinstance(d, TwoPiecePreference):
        if m != 2:
            raise ValueError("two-piece preferences have m = 2")
        bad = []
        if d.eval(0) is not Side.LEFT:
            bad.append((Partition((0, 1)), d.eval(0)))
        if d.eval(1) is not Side.RIGHT:
            bad.append((Partition((1, 0)), d.eval(1)))
        return AssumptionReport(not bad, True, bad)
    if isinstance(d, AdditivePlayer) and d.mode == "lazy":
        bad = _lazy_additive_violations(d.measure, m)
        return AssumptionReport(not bad, True, bad)
    bad = []
    for x in _grid_partitions(m, resolution):
        got = d(x)
        if got != x.empty_pieces:
            bad.append((x, got))
    return AssumptionReport(not bad, False, bad)


def _lazy_additive_violations(c: AdditivePiecewiseConstant, m: int) -> list:
    tol = TIE_TOL
    if m == 1:
        return []
    if c.total <= tol:
        return [("whole cake", c.total)]
    if m == 2:
        return []
    if m == 3:
        # nonempty pieces are a prefix [0, t] and suffix [t, 1]; both must stay positive.
        # The prefix cost is piecewise linear, so checking block edges and the
        # slopes at either end of the cake is enough.
        bad = []
        if c.densities[0] <= 0:
            bad.append(("prefix near 0", c.densities[0]))
        if c.densities[-1] <= 0:
            bad.append(("suffix near 1", c.densities[-1]))
        for t in c.edges[1:-1]:
            if c.cumulative(t) <= tol:
                bad.append((("prefix", t), c.cumulative(t)))
            if c.total - c.cumulative(t) <= tol:
                bad.append((("suffix", t), c.total - c.cumulative(t)))
        return bad
    # with m >= 4 any subinterval can be a nonempty piece
    return [((s, e), d) for s, e, d in c.blocks if d <= 0]
