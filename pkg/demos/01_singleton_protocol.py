"""A lone player against a group: one question per player is enough.

Five players each describe which of two pieces they prefer as a single cut
moves from left to right.  Each player is asked once for the first point at
which the left piece becomes acceptable; cutting at the smallest answer
gives that player the left piece and leaves everybody else content with
the right one.
"""

from fractions import Fraction as F

from fairslice import PreferenceOracle, Side, TwoPiecePreference, singleton_first, verify_envy_free

R, L = Side.RIGHT, Side.LEFT
players = [
    TwoPiecePreference.alternating([F(3, 10), F(1, 2), F(7, 10)], R),
    TwoPiecePreference.alternating([F(2, 5)], R),
    TwoPiecePreference.alternating([F(7, 20), F(9, 20), F(3, 5)], R),
    TwoPiecePreference.alternating([F(1, 4), F(1, 3), F(4, 5)], R),
    TwoPiecePreference.alternating([F(11, 20)], R),
]

oracle = PreferenceOracle(players)
report = singleton_first(oracle)

print("Questions asked:")
for query, answer in report.transcript:
    print(f"  player {query.player}: first indifference point -> {answer}")
print(f"\nCut at {report.cut}; left piece to {sorted(report.assignment.groups[0])}, "
      f"right piece to {sorted(report.assignment.groups[1])}")
print("Envy-free:", verify_envy_free(report.assignment, players).ok)

# a preference that switches back and forth still finds the right piece acceptable
# everywhere before its first switch, which is all the protocol relies on
for i, p in enumerate(players):
    print(f"  player {i} at the cut prefers {p.eval(report.cut).name.lower()}")
