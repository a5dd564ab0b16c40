
import numpy as np
import pytest

from fairslice.core import AdditivePiecewiseConstant, Side, TwoPiecePreference
from fairslice.mixed import (
    NoHalvingFound, PieceCollection, SearchBudgetExceeded, consensus_halving_grid, gen_counterexample,
    halving_then_pick, min_cut_search, physically_consistent, single_cut_supporters,
    utility_table_csv, verify_collection_ef,
)


def test_counterexample_shape():
    five = gen_counterexample(5)
    for i, u in enumerate(five):
        assert u.total == pytest.approx(1 if i % 2 == 0 else -1)
        assert u.value(i / 5, (i + 1) / 5) == pytest.approx(u.total)
        assert u.value(0, i / 5) == 0
    signs = [np.sign(u.total) for u in gen_counterexample(4)]
    assert signs == [1, -1, 1, -1]
    with pytest.raises(ValueError):
        gen_counterexample(3)


def test_collection_validation():
    with pytest.raises(ValueError):
        PieceCollection((0.5, 0.3), ("A", "B", "A"))
    with pytest.raises(ValueError):
        PieceCollection((0.5,), ("A",))
    c = PieceCollection.alternating([0.25, 0.5], "B")
    assert c.side_labels == ("B", "A", "B") and c.cut_count == 2
    assert c.intervals("A") == [(0.25, 0.5)]


def test_single_cut_at_half():
    left, right = single_cut_supporters(gen_counterexample(5), 0.5)
    assert left == [0, 2, 3] and right == [1, 2, 4]


def test_whole_cake_versus_nothing():
    players = gen_counterexample(5)
    whole = PieceCollection((), ("A",))
    report = verify_collection_ef(whole, players, (4, 1))
    assert [round(a, 9) for a, _ in report.utilities] == [1, -1, 1, -1, 1]
    assert all(b == 0 for _, b in report.utilities)
    assert not report


def test_zero_utilities_always_envy_free():
    zero = [AdditivePiecewiseConstant.uniform(0)] * 3
    report = verify_collection_ef(PieceCollection.alternating([0.3, 0.6]), zero, (2, 1))
    assert report and report.grouping == ((0, 1), (2,))


def test_no_single_cut_for_five_players_on_fine_grid():
    res = min_cut_search(gen_counterexample(5), (4, 1), max_cuts=1, grid_resolution=10_000)
    assert res.solution is None
    assert [o.cut_count for o in res.outcomes] == [0, 1]


def test_four_players_found_with_few_cuts():
    players = gen_counterexample(4)
    res = min_cut_search(players, (3, 1), max_cuts=4, grid_resolution=16)
    assert res.solution is not None and 1 <= res.solution.cut_count <= 4
    assert verify_collection_ef(res.solution, players, (3, 1))
    assert "placements_examined" in res.outcomes_csv()


def test_search_budget():
    with pytest.raises(SearchBudgetExceeded):
        min_cut_search(gen_counterexample(6), (5, 1), max_cuts=4, grid_resolution=1000, max_placements=10)


def test_halving_single_uniform():
    c = consensus_halving_grid([AdditivePiecewiseConstant.uniform()], 1, 0.01, 100)
    assert c.cuts == (0.5,) and c.side_labels == ("A", "B")


def test_halving_five_players():
    players = gen_counterexample(5)
    c = consensus_halving_grid(players, 5, 0.02, 200)
    for u in players:
        assert abs(c.utility(u, "A") - c.utility(u, "B")) <= 0.02
    for sizes in ((4, 1), (3, 2), (2, 3), (1, 4)):
        assert verify_collection_ef(c, players, sizes, tol=0.02)


def test_halving_not_found():
    with pytest.raises(NoHalvingFound):
        consensus_halving_grid(gen_counterexample(5), 2, 0.02, 50)


def test_halving_then_pick():
    players = gen_counterexample(5)
    pick = halving_then_pick(players, 0.02, 200)
    assert pick.collection.cut_count <= 4 and pick.report
    assert 4 in pick.report.grouping[1]
    assert utility_table_csv(pick.collection, players).startswith("player,utility_A,utility_B")


def test_physical_consistency():
    always_right = TwoPiecePreference((0, 1), (Side.RIGHT,))
    assert not physically_consistent(always_right)
    assert physically_consistent(TwoPiecePreference((0, 0.5, 1), (Side.RIGHT, Side.LEFT)))
    assert physically_consistent(TwoPiecePreference((0, 0.5, 1), (Side.LEFT, Side.RIGHT)))
