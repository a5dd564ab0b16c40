"""Dividing chores by dividing exemptions.

Lazy players want as little work as possible.  Giving each piece an
exemption and asking players which exemption they want turns the chore
problem into an ordinary hungry-player division.  With two groups and a
singleton the answer is exact; with more groups it comes from the
approximate solver.
"""

from fractions import Fraction as F

from fairslice.chores import hat, solve_chores, verify_chores
from fairslice.core import AdditivePiecewiseConstant, AdditivePlayer, Partition

def cost(*densities):
    edges = [F(k, len(densities)) for k in range(len(densities) + 1)]
    return AdditivePlayer(AdditivePiecewiseConstant.from_edges(edges, [F(d) for d in densities]), "lazy")


workers = [cost(1, 3), cost(2, 1), cost(1, 1), cost(3, 1, 1), cost(1, 1, 4)]

print("Exemption map for three pieces: (0.4, 0.3, 0.3) ->",
      tuple(float(v) for v in hat(Partition((F(2, 5), F(3, 10), F(3, 10))))))

sol = solve_chores(workers, (1, 4))
print("\nOne worker alone, four together")
print("  chores:", [str(v) for v in sol.assignment.partition.lengths])
print("  groups:", [sorted(g) for g in sol.assignment.groups])
print("  exact:", sol.exact, " envy-free:", verify_chores(sol, workers).ok)

sol = solve_chores(workers, (2, 1, 2), tolerance=1e-3)
print("\nThree groups (approximate)")
print("  chores:", [round(float(v), 4) for v in sol.assignment.partition.lengths])
print("  groups:", [sorted(g) for g in sol.assignment.groups])
for j, group in enumerate(sol.assignment.groups):
    for i in sorted(group):
        costs = workers[i].measure.piece_values(sol.assignment.partition)
        print(f"  worker {i}: own piece costs {float(costs[j]):.4f}, cheapest costs {float(min(costs)):.4f}")
