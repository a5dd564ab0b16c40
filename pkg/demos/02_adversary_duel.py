"""No finite protocol works when both groups have at least two members.

An adversary answers the protocol's questions on the fly, revealing as
little as possible: wherever it has committed to an answer, at least three
of the four players want the same piece.  Whatever cut the protocol ends
with, a group of two on the unpopular side contains a disappointed player.
Afterwards the adversary produces complete preferences consistent with
every answer it gave, so the failure is genuine.
"""

from fairslice.adversary import BUILTIN_PROTOCOLS, AdversaryState, additive_representation, duel

for name in ("marks", "binary-search", "random-prober", "indifference-walker"):
    state = AdversaryState(4)
    report = duel(BUILTIN_PROTOCOLS[name](seed=1), n=4, group_sizes=(2, 2), max_queries=200, state=state)
    cut = report.assignment.partition.lengths[0]
    player, piece = report.verdict
    print(f"{name:20s} {len(report.transcript):4d} queries, cut at 1 - {float(1 - cut):.3g}: "
          f"player {player} envies piece {piece}; completion replays every answer: {report.consistent}")

# repeated halving shrinks the unknown gaps below float resolution, but never to zero
print("\nUnknown gaps after the last duel (exact rationals, shown as widths):")
for lo, hi in state.gaps():
    print(f"  starts at 1 - {float(1 - lo):.3g}, width {float(hi - lo):.3g}")

# the completed preferences even come from additive utilities, with signed densities
p = report.completed[0]
u = additive_representation(p)
print(f"\nPlayer 0's completed preference has {len(p.switch_points)} switch points;")
print(f"its utility crosses 1/2 at exactly those points: {u.crossings() == list(p.switch_points)}")
print(f"negative density somewhere: {any(d < 0 for d in u.densities())}")
