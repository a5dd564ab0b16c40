"""Approximate envy-free contiguous division by Sperner path-following.

Partitions of the cake into ``n`` pieces are encoded by integer cut
coordinates ``0 <= c_1 <= ... <= c_{n-1} <= N`` on a grid of mesh ``1/N``.
That region is triangulated by Kuhn (Freudenthal) simplices: each simplex
starts at a base vertex and adds unit vectors in the order of a
permutation, so the coordinate sums of its vertices are consecutive
integers.  Vertex ``v`` is *owned* by player ``sum(v) mod n``, which gives
every elementary simplex all ``n`` owners.  The owner labels the vertex
with a piece it prefers and that is nonempty; for hungry players this is a
Sperner labelling.

A fully labelled simplex is reached by the classical door-to-door walk
through the faces ``F_0 < F_1 < ... < F_{n-1}`` (``F_j`` = partitions whose
pieces after ``j`` are empty).  The walk starts at the vertex where piece 0
is the whole cake and never revisits a simplex, so it terminates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from fairslice.core import (
    Assignment, Partition, group_of_piece, merge_adjacent,
)

logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class ToleranceNotReached(SolverError):
    def __init__(self, message, solution):
        super().__init__(message)
        self.solution = solution


class EvaluationBudgetExceeded(SolverError):
    pass


class NotHungryError(SolverError):
    pass


@dataclass(frozen=True)
class SpernerCertificate:
    """A fully labelled elementary simplex.

    ``vertices`` are partitions, ``owners[k]`` owns vertex ``k`` and
    ``labels[k]`` is the piece the owner chose there.
    """

    vertices: tuple
    owners: tuple
    labels: tuple
    grid: int

    @property
    def diameter(self) -> float:
        return max(
            (max(abs(a - b) for a, b in zip(u.lengths, v.lengths))
             for u in self.vertices for v in self.vertices),
            default=0.0,
        )

    def barycenter(self) -> Partition:
        n = len(self.vertices)
        sums = [sum(v.lengths[j] for v in self.vertices) for j in range(self.vertices[0].m)]
        return Partition(tuple(s / n for s in sums))

    def piece_of_player(self) -> tuple:
        out = [None] * len(self.owners)
        for owner, lab in zip(self.owners, self.labels):
            out[owner] = lab
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "diameter": float(self.diameter),
            "vertices": [[float(v) for v in x.lengths] for x in self.vertices],
            "owners": list(self.owners),
            "labels": list(self.labels),
        }


def validate_certificate(cert: SpernerCertificate, demands: Sequence, tolerance: Optional[float] = None) -> list:
    """Independent re-check of a certificate; returns a list of problems (empty if valid)."""
    n = len(demands)
    problems = []
    if sorted(cert.labels) != list(range(n)):
        problems.append(f"labels {cert.labels} are not a permutation")
    if sorted(cert.owners) != list(range(n)):
        problems.append(f"owners {cert.owners} are not a permutation")
    for x, owner, lab in zip(cert.vertices, cert.owners, cert.labels):
        if lab not in demands[owner](x):
            problems.append(f"player {owner} does not prefer piece {lab} at {x.lengths}")
        if x.lengths[lab] == 0:
            problems.append(f"piece {lab} is empty at {x.lengths}")
    if tolerance is not None and cert.diameter > tolerance:
        problems.append(f"diameter {cert.diameter} exceeds {tolerance}")
    return problems


@dataclass
class IndividualSolution:
    partition: Partition
    piece_of_player: tuple
    certificate: SpernerCertificate
    evaluations: int

    @property
    def assignment(self) -> Assignment:
        groups = [frozenset({p}) for p in sorted(range(len(self.piece_of_player)),
                                                  key=lambda p: self.piece_of_player[p])]
        return Assignment(self.partition, tuple(groups))


class _Labeler:
    def __init__(self, demands, grid, max_evaluations):
        self.demands = demands
        self.n = len(demands)
        self.grid = grid
        self.max_evaluations = max_evaluations
        self.cache = {}

    def partition(self, c) -> Partition:
        pts = (0, *c, self.grid)
        return Partition(tuple((b - a) / self.grid for a, b in zip(pts, pts[1:])))

    def owner(self, c) -> int:
        return sum(c) % self.n

    def __call__(self, c) -> int:
        lab = self.cache.get(c)
        if lab is None:
            if self.max_evaluations is not None and len(self.cache) >= self.max_evaluations:
                raise EvaluationBudgetExceeded(f"more than {self.max_evaluations} demand evaluations")
            x = self.partition(c)
            owner = self.owner(c)
            choices = sorted(self.demands[owner](x) & x.nonempty_pieces)
            if not choices:
                raise NotHungryError(f"player {owner} prefers only empty pieces at {x.lengths}")
            lab = self.cache[c] = choices[0]
        return lab


def _vertices(base, perm):
    out = [base]
    v = list(base)
    for axis in perm:
        v[axis] += 1
        out.append(tuple(v))
    return out


def _pivot(base, perm, r):
    """Kuhn neighbour across the facet opposite vertex ``r``; returns (base, perm, new index)."""
    j = len(perm)
    if 0 < r < j:
        p = list(perm)
        p[r - 1], p[r] = p[r], p[r - 1]
        return base, tuple(p), r
    if r == 0:
        b = list(base)
        b[perm[0]] += 1
        return tuple(b), perm[1:] + perm[:1], j
    b = list(base)
    b[perm[-1]] -= 1
    return tuple(b), perm[-1:] + perm[:-1], 0


def _inside(base, perm, grid) -> bool:
    for v in _vertices(base, perm):
        if v[0] < 0 or v[-1] > grid or any(a > b for a, b in zip(v, v[1:])):
            return False
    return True


def sperner_walk(demands: Sequence, grid: int, max_evaluations: Optional[int] = None):
    """Door-to-door walk to a fully labelled simplex at mesh ``1/grid``.

    Returns ``(certificate, number of demand evaluations)``.
    """
    n = len(demands)
    d = n - 1
    lab = _Labeler(demands, grid, max_evaluations)

    def full(v):
        return v + (grid,) * (d - len(v))

    if lab(full(())) != 0:
        raise SolverError("the whole cake as piece 0 must be labelled 0")
    base, perm, j = (), (), 0
    action, entered = "up", None
    steps = 0
    while True:
        steps += 1
        if action == "up":
            if j == d:
                break
            base, perm, j = base + (grid - 1,), (j,) + perm, j + 1
            entered = 0
        labels = [lab(full(v)) for v in _vertices(base, perm)]
        if action == "down":
            r = labels.index(j)
        else:
            new = labels[entered]
            if new == j:
                action = "up"
                continue
            r = next(k for k, l in enumerate(labels) if l == new and k != entered)
        nb, np_, idx = _pivot(base, perm, r)
        if j and _inside(nb, np_, grid):
            base, perm, entered, action = nb, np_, idx, "enter"
            continue
        # the door lies on the face where piece j is empty: drop one level
        if r != 0 or perm[0] != j - 1:
            raise SolverError("walk left the simplex through a face without a door")
        b = list(base)
        b[j - 1] += 1
        base, perm, j = tuple(b[: j - 1]), perm[1:], j - 1
        action = "down"
    verts = [full(v) for v in _vertices(base, perm)]
    cert = SpernerCertificate(
        vertices=tuple(lab.partition(v) for v in verts),
        owners=tuple(lab.owner(v) for v in verts),
        labels=tuple(lab(v) for v in verts),
        grid=grid,
    )
    logger.debug("sperner walk: grid %d, %d steps, %d evaluations", grid, steps, len(lab.cache))
    return cert, len(lab.cache)


def solve_individual(demands: Sequence, tolerance: float = 1e-2, max_depth: int = 20,
                     max_evaluations: Optional[int] = None) -> IndividualSolution:
    """Approximately envy-free contiguous division for ``n`` hungry players.

    The grid mesh is the smallest power of two ``1/N <= tolerance``; the
    returned partition is the barycentre of a fully labelled simplex of
    diameter ``1/N``, and player ``i`` receives the piece it labelled.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = len(demands)
    if n == 0:
        raise ValueError("no players")
    if n == 1:
        whole = Partition((1,))
        cert = SpernerCertificate((whole,), (0,), (0,), 1)
        return IndividualSolution(whole, (0,), cert, 0)
    depth = max(1, math.ceil(math.log2(1 / tolerance) - 1e-12))
    capped = depth > max_depth
    grid = 2 ** min(depth, max_depth)
    cert, evals = sperner_walk(demands, grid, max_evaluations)
    solution = IndividualSolution(cert.barycenter(), cert.piece_of_player(), cert, evals)
    if capped:
        raise ToleranceNotReached(
            f"tolerance {tolerance} needs depth {depth} > {max_depth}; diameter {cert.diameter}", solution)
    return solution


class GroupPseudoDemand:
    """Individual-instance player built from a group-instance player.

    At an ``n``-partition it prefers every piece whose merged group piece the
    original player prefers.
    """

    def __init__(self, demand, group_sizes: Sequence[int]):
        self.demand = demand
        self.group_sizes = tuple(group_sizes)
        self.group_of = group_of_piece(group_sizes)

    def __call__(self, x: Partition) -> frozenset:
        preferred = self.demand(merge_adjacent(x, self.group_sizes))
        return frozenset(t for t, g in enumerate(self.group_of) if g in preferred)


@dataclass
class GroupSolution:
    assignment: Assignment
    individual: IndividualSolution

    @property
    def certificate(self) -> SpernerCertificate:
        return self.individual.certificate


def solve_groups(demands: Sequence, group_sizes: Sequence[int], tolerance: float = 1e-2,
                 max_depth: int = 20, max_evaluations: Optional[int] = None) -> GroupSolution:
    """Envy-free division for groups via the merge reduction to individual players.

    Player ``i`` labelled piece ``t`` of the ``n``-partition; it joins the
    group whose run of pieces contains ``t``.
    """
    group_sizes = tuple(group_sizes)
    n = len(demands)
    if sum(group_sizes) != n or any(k <= 0 for k in group_sizes):
        raise ValueError(f"group sizes {group_sizes} do not add up to {n} players")
    pseudo = [GroupPseudoDemand(d, group_sizes) for d in demands]
    try:
        sol = solve_individual(pseudo, tolerance, max_depth, max_evaluations)
    except ToleranceNotReached as exc:
        exc.solution = _merge(exc.solution, group_sizes)
        raise
    return _merge(sol, group_sizes)


def _merge(sol: IndividualSolution, group_sizes) -> GroupSolution:
    owner_group = group_of_piece(group_sizes)
    groups = [set() for _ in group_sizes]
    for player, piece in enumerate(sol.piece_of_player):
        groups[owner_group[piece]].add(player)
    partition = merge_adjacent(sol.partition, group_sizes)
    return GroupSolution(Assignment(partition, tuple(groups)), sol)


def envy_slack(assignment: Assignment, measures: Sequence) -> float:
    """Largest utility gap by which any player prefers another group's piece (additive players)."""
    worst = 0.0
    for j, group in enumerate(assignment.groups):
        for i in group:
            values = measures[i].piece_values(assignment.partition)
            worst = max(worst, float(max(values) - values[j]))
    return worst
