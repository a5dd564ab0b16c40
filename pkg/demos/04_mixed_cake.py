"""A mixed cake where one cut is never enough.

Five players each care about one fifth of the cake, alternately loving
and hating it.  For every single cut, each side is wanted by at most three
players, so four players can never share one side happily.  A brute-force
grid search confirms that fewer than n - 3 cuts fail in general, while
halving the cake for all but one player and letting the last one pick
always works with n - 1 cuts.
"""

import numpy as np

from fairslice.mixed import gen_counterexample, halving_then_pick, min_cut_search, single_cut_supporters

players = gen_counterexample(5)
left, right = single_cut_supporters(players, 0.5)
print(f"Cut at 0.5: left wanted by {left}, right by {right}")
worst = max(max(len(a), len(b)) for a, b in (single_cut_supporters(players, t) for t in np.linspace(0, 1, 1001)))
print(f"Most supporters of one side over 1001 single cuts: {worst}")

for n in (4, 5, 6, 7):
    us = gen_counterexample(n)
    few = min_cut_search(us, (n - 1, 1), max_cuts=n - 4, grid_resolution=40 * n)
    pick = halving_then_pick(us, eps=0.02, grid_resolution=40 * n)
    least = min_cut_search(us, (n - 1, 1), max_cuts=n - 1, grid_resolution=4 * n).solution
    print(f"n={n}: none with <= {n - 4} cuts: {few.solution is None};  "
          f"halve-and-pick uses {pick.collection.cut_count} cuts;  "
          f"coarse search needs {least.cut_count} (lower bound {n - 3})")
