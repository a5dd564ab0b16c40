"""Chore division for groups via exemptions.

A lazy (chore) player is turned into a hungry player over *exemptions*:
at a partition ``x`` the exemption lengths ``(m - 1) x`` leave the chore
partition ``hat(x) = 1 - (m - 1) x``.  Inside the sub-simplex where every
``x_j <= 1/(m-1)`` the hungry player demands what the lazy player demands
at ``hat(x)``; outside it demands the over-allocated pieces.  Solving the
exemption instance and mapping the partition back gives an envy-free chore
division with the same groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from fairslice.core import (
    SIMPLEX_TOL, AdditivePlayer, Assignment, Partition, TwoPiecePreference,
    exact_two_piece, validate_lazy,
)
from fairslice.protocols import verify_envy_free, singleton_first, singleton_last
from fairslice.queries import PreferenceOracle
from fairslice.solver import solve_groups


class NotLazyError(ValueError):
    pass


class ChoreSolverError(RuntimeError):
    pass


def hat(x: Partition) -> tuple:
    """``1 - (m - 1) x_j`` for every piece; sums to one, a partition iff ``x`` is in delta."""
    m = x.m
    return tuple(1 - (m - 1) * v for v in x.lengths)


def unhat(y: Sequence) -> tuple:
    """Inverse of :func:`hat`."""
    m = len(y)
    return tuple((1 - v) / (m - 1) for v in y)


def in_delta(x: Partition, tol: float = SIMPLEX_TOL) -> bool:
    """Every piece is at most ``1/(m-1)`` long."""
    if x.m == 1:
        return True
    bound = Fraction(1, x.m - 1)
    return all(v <= bound + tol for v in x.lengths)


def hat_partition(x: Partition, slack: float = 0.0) -> Partition:
    """:func:`hat` as a :class:`Partition`.

    Rounding noise at zero is snapped away; with ``slack > 0`` points up to
    that far outside delta are clipped onto it (approximate solver output).
    """
    noise = x.m * SIMPLEX_TOL + (x.m - 1) * slack
    vals = [v if abs(v) > noise else 0 for v in hat(x)]
    if any(v < 0 for v in vals):
        raise ValueError(f"{x.lengths} lies outside delta")
    total = sum(vals)
    return Partition(tuple(v / total for v in vals) if total != 1 else tuple(vals))


@dataclass(frozen=True)
class LiftedDemand:
    """Hungry exemption player built from a lazy chore player over ``m`` pieces."""

    lazy: object
    m: int

    def __call__(self, x: Partition) -> frozenset:
        if x.m != self.m:
            raise ValueError(f"expected {self.m} pieces, got {x.m}")
        if self.m == 1:
            return frozenset({0})
        if in_delta(x):
            return frozenset(self.lazy(hat_partition(x)))
        bound = Fraction(1, self.m - 1)
        return frozenset(j for j, v in enumerate(x.lengths) if v >= bound - SIMPLEX_TOL)


def lift_demand(lazy, m: int, check: bool = True) -> LiftedDemand:
    if check and isinstance(lazy, (TwoPiecePreference, AdditivePlayer)):
        report = validate_lazy(lazy, m)
        if not report:
            raise NotLazyError(f"not a lazy player: {report.violations[:3]}")
    return LiftedDemand(lazy, m)


def lift_two_piece(lazy: TwoPiecePreference) -> TwoPiecePreference:
    """Exact lift for two pieces: ``hat`` swaps the lengths, so cutting the exemptions
    at ``c`` is cutting the chore at ``1 - c`` with the piece indices kept."""
    if not lazy.is_lazy:
        raise NotLazyError(f"preference {lazy.labels} is not lazy")
    bps = tuple(1 - b for b in reversed(lazy.breakpoints))
    return TwoPiecePreference(bps, tuple(reversed(lazy.labels)))


@dataclass
class ChoreSolution:
    assignment: Assignment
    exemptions: Assignment
    exact: bool


def solve_chores(lazy_demands: Sequence, group_sizes: Sequence[int], tolerance: float = 1e-2,
                 **solver_options) -> ChoreSolution:
    """Envy-free chore division for groups of the given sizes.

    Two groups with a singleton side and breakpoint-representable players go
    through the exact singleton protocol on the lifted preferences; everything
    else uses the approximate group solver.
    """
    group_sizes = tuple(group_sizes)
    n, m = len(lazy_demands), len(group_sizes)
    if sum(group_sizes) != n or any(k <= 0 for k in group_sizes):
        raise ValueError(f"group sizes {group_sizes} do not add up to {n} players")
    if m == 1:
        whole = Assignment(Partition((1,)), (frozenset(range(n)),))
        return ChoreSolution(whole, whole, True)
    for i, d in enumerate(lazy_demands):
        if isinstance(d, (TwoPiecePreference, AdditivePlayer)):
            report = validate_lazy(d, m)
            if not report:
                raise NotLazyError(f"player {i} is not lazy: {report.violations[:3]}")

    if m == 2 and min(group_sizes) == 1:
        two = [exact_two_piece(d) for d in lazy_demands]
        if all(p is not None for p in two):
            lifted = [lift_two_piece(p) for p in two]
            oracle = PreferenceOracle(lifted)
            report = singleton_first(oracle) if group_sizes[0] == 1 else singleton_last(oracle)
            exemptions = report.assignment
            chores = Assignment(hat_partition(exemptions.partition), exemptions.groups)
            return ChoreSolution(chores, exemptions, True)

    lifted = [lift_demand(d, m, check=False) for d in lazy_demands]
    sol = solve_groups(lifted, group_sizes, tolerance, **solver_options)
    y = sol.assignment.partition
    diameter = sol.certificate.diameter
    if not in_delta(y, SIMPLEX_TOL + diameter):
        raise ChoreSolverError(f"exemption partition {y.lengths} outside delta")
    chores = Assignment(hat_partition(y, diameter), sol.assignment.groups)
    return ChoreSolution(chores, sol.assignment, False)


def verify_chores(solution: ChoreSolution, lazy_demands: Sequence):
    return verify_envy_free(solution.assignment, lazy_demands)
