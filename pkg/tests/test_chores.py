import random
from fractions import Fraction

import pytest

from builders import random_additive
from fairslice.chores import (
    NotLazyError, hat, hat_partition, in_delta, lift_demand, lift_two_piece, solve_chores, unhat,
    verify_chores,
)
from fairslice.core import (
    AdditivePiecewiseConstant, AdditivePlayer, Partition, Side, TwoPiecePreference, cost_demand,
    exact_two_piece, two_piece_partition,
)

F = Fraction
UNIFORM_COST = AdditivePlayer(AdditivePiecewiseConstant.uniform(), "lazy")


def test_hat_examples():
    assert hat(Partition((F(3, 10), F(7, 10)))) == (F(7, 10), F(3, 10))
    third = Partition((F(1, 3),) * 3)
    assert hat(third) == third.lengths
    assert hat(Partition((F(3, 5), F(1, 5), F(1, 5)))) == (F(-1, 5), F(3, 5), F(3, 5))
    assert unhat(hat(third)) == third.lengths


def test_hat_outside_delta_is_not_a_partition():
    with pytest.raises(ValueError):
        hat_partition(Partition((F(3, 5), F(1, 5), F(1, 5))))


def test_in_delta():
    assert in_delta(Partition((1, 0)))
    assert in_delta(Partition((0.5, 0.5, 0)))
    assert not in_delta(Partition((0.6, 0.2, 0.2)))


def test_lift_two_pieces_swaps():
    c = AdditivePiecewiseConstant.from_edges([0, F(1, 2), 1], [1, 3])
    lazy = AdditivePlayer(c, "lazy")
    h = lift_demand(lazy, 2)
    for k in range(0, 11):
        x = two_piece_partition(F(k, 10))
        assert h(x) == lazy(Partition(tuple(reversed(x.lengths))))


def test_lift_three_pieces():
    h = lift_demand(UNIFORM_COST, 3)
    assert h(Partition((F(1, 2), F(1, 2), 0))) == {0, 1}
    assert h(Partition((F(3, 5), F(3, 10), F(1, 10)))) == {0}


def test_lift_rejects_hungry_players():
    with pytest.raises(NotLazyError):
        lift_demand(AdditivePlayer(AdditivePiecewiseConstant.uniform()), 3)
    with pytest.raises(NotLazyError):
        lift_two_piece(TwoPiecePreference((0, 0.5, 1), (Side.RIGHT, Side.LEFT)))


def test_lift_two_piece_agrees_with_general_lift():
    rng = random.Random(8)
    for _ in range(50):
        lazy = random_additive(rng, "lazy")
        exact = lift_two_piece(exact_two_piece(lazy))
        general = lift_demand(lazy, 2)
        for k in range(1, 100):
            x = two_piece_partition(F(k, 100))
            if F(k, 100) not in exact.switch_points:
                assert exact(x) == general(x)


def test_identical_uniform_pair():
    sol = solve_chores([UNIFORM_COST, UNIFORM_COST], (1, 1))
    assert sol.exact
    assert sol.assignment.partition.lengths == (F(1, 2), F(1, 2))
    assert verify_chores(sol, [UNIFORM_COST] * 2)


@pytest.mark.parametrize("sizes", [(1, 3), (3, 1), (1, 1)])
def test_exact_path_random(sizes):
    rng = random.Random(sum(sizes) * 10 + sizes[0])
    for _ in range(40):
        costs = [random_additive(rng, "lazy") for _ in range(sum(sizes))]
        sol = solve_chores(costs, sizes)
        assert sol.exact and sol.assignment.group_sizes == sizes
        assert verify_chores(sol, costs)


def test_approximate_path_two_by_two():
    rng = random.Random(21)
    costs = [random_additive(rng, "lazy", allow_zero=False) for _ in range(4)]
    sol = solve_chores(costs, (2, 2), tolerance=1e-3)
    assert not sol.exact
    x = sol.assignment.partition
    lipschitz = max(max(c.measure.densities) for c in costs)
    for j, group in enumerate(sol.assignment.groups):
        for i in group:
            vals = costs[i].measure.piece_values(x)
            assert vals[j] <= min(vals) + 4 * lipschitz * 1e-3


def test_three_uniform_singletons():
    sol = solve_chores([UNIFORM_COST] * 3, (1, 1, 1), tolerance=1e-3)
    assert max(abs(v - 1 / 3) for v in sol.assignment.partition.lengths) <= 1e-2


def test_three_groups_random_costs():
    rng = random.Random(5)
    costs = [random_additive(rng, "lazy", allow_zero=False) for _ in range(5)]
    sol = solve_chores(costs, (2, 1, 2), tolerance=1e-3)
    x = sol.assignment.partition
    lipschitz = max(max(c.measure.densities) for c in costs)
    for j, group in enumerate(sol.assignment.groups):
        for i in group:
            vals = costs[i].measure.piece_values(x)
            assert vals[j] <= min(vals) + 4 * lipschitz * 1e-3


def test_rejects_non_lazy_player():
    zero_block = AdditivePlayer(AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [0, 1]), "lazy")
    with pytest.raises(NotLazyError):
        solve_chores([zero_block, UNIFORM_COST, UNIFORM_COST], (1, 1, 1))


def test_single_group():
    sol = solve_chores([UNIFORM_COST] * 3, (3,))
    assert sol.assignment.partition.lengths == (1,)


def test_exact_result_is_exactly_envy_free():
    rng = random.Random(77)
    costs = [random_additive(rng, "lazy") for _ in range(6)]
    sol = solve_chores(costs, (1, 5))
    x = sol.assignment.partition
    for j, group in enumerate(sol.assignment.groups):
        for i in group:
            assert j in cost_demand(costs[i].measure, x)
