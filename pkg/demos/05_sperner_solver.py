"""Approximate envy-free division for any number of groups.

The solver walks a triangulation of all possible cut positions until it
finds a tiny simplex whose corners are labelled by every piece, each label
chosen by a different player.  Near such a simplex every player gets a
piece they (almost) prefer.  The simplex doubles as a certificate that can
be checked independently.
"""

from fairslice.core import AdditivePiecewiseConstant, AdditivePlayer
from fairslice.solver import envy_slack, solve_groups, solve_individual, validate_certificate

tastes = [
    AdditivePiecewiseConstant.from_edges([0, 1 / 3, 2 / 3, 1], [3, 0, 0]),
    AdditivePiecewiseConstant.from_edges([0, 1 / 3, 2 / 3, 1], [0, 3, 0]),
    AdditivePiecewiseConstant.from_edges([0, 1 / 3, 2 / 3, 1], [0, 0, 3]),
]
players = [AdditivePlayer(t) for t in tastes]

for tol in (1e-1, 1e-2, 1e-3):
    sol = solve_individual(players, tolerance=tol)
    print(f"tolerance {tol:g}: pieces {[round(v, 4) for v in sol.partition.lengths]}, "
          f"players get {sol.piece_of_player}, {sol.evaluations} demand evaluations, "
          f"envy slack {envy_slack(sol.assignment, tastes):.2e}, "
          f"certificate valid: {not validate_certificate(sol.certificate, players, tol)}")

four = [AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [a, 2 - a]) for a in (0.5, 1.0, 1.5, 1.9)]
sol = solve_groups([AdditivePlayer(t) for t in four], (2, 2), tolerance=1e-3)
print(f"\nTwo groups of two: pieces {[round(v, 4) for v in sol.assignment.partition.lengths]}, "
      f"groups {[sorted(g) for g in sol.assignment.groups]}, envy slack {envy_slack(sol.assignment, four):.2e}")
