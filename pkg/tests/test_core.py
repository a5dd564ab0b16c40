from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fairslice.core import (
    AdditivePiecewiseConstant, AdditivePlayer, Assignment, InvalidPartition, Partition, Side,
    TwoPiecePreference, additive_demand, canonicalize, cost_demand, exact_two_piece, merge_adjacent,
    two_piece_eval, two_piece_partition, validate_hungry, validate_lazy, validate_partition,
)
from fairslice.mixed import gen_counterexample

R, L, B = Side.RIGHT, Side.LEFT, Side.BOTH


class TestPartition:
    def test_valid(self):
        assert validate_partition([0.3, 0.7]).lengths == (0.3, 0.7)

    def test_empty_piece_allowed(self):
        x = validate_partition([0, 0.2, 0.8])
        assert x.empty_pieces == {0}
        assert x.nonempty_pieces == {1, 2}

    @pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], []])
    def test_invalid(self, bad):
        with pytest.raises(InvalidPartition):
            validate_partition(bad)

    def test_input_tolerance_normalises(self):
        x = validate_partition([0.5, 0.5 + 1e-10])
        assert sum(x.lengths) == pytest.approx(1, abs=1e-15)

    def test_cut_view(self):
        x = Partition((Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)))
        assert x.cuts == (Fraction(1, 4), Fraction(1, 2))
        assert x.cut_points == (0, Fraction(1, 4), Fraction(1, 2), 1)
        assert Partition.from_cuts(x.cuts) == x

    @pytest.mark.parametrize("x, sizes, want", [
        ((0.1, 0.2, 0.3, 0.4), (2, 2), (0.30000000000000004, 0.7)),
        ((0.25, 0.25, 0.25, 0.25), (1, 3), (0.25, 0.75)),
        ((1, 0, 0), (3,), (1,)),
    ])
    def test_merge_adjacent(self, x, sizes, want):
        assert merge_adjacent(Partition(x), sizes).lengths == pytest.approx(want)


class TestAssignment:
    def test_groups_partition_players(self):
        a = Assignment(two_piece_partition(0.5), ({0, 2}, {1}))
        assert a.n == 3 and a.group_sizes == (2, 1) and a.group_of(2) == 0

    def test_rejects_missing_player(self):
        with pytest.raises(ValueError):
            Assignment(two_piece_partition(0.5), ({0, 2}, {3}))

    def test_rejects_wrong_piece_count(self):
        with pytest.raises(ValueError):
            Assignment(two_piece_partition(0.5), ({0},))


class TestTwoPiece:
    p = TwoPiecePreference((0, 0.4, 1), (R, L))

    def test_eval(self):
        assert two_piece_eval(self.p, 0.4) is B
        assert self.p.eval(0) is R
        assert self.p.eval(1) is L
        assert self.p.eval(0.2) is R and self.p.eval(0.7) is L

    def test_partition_call(self):
        assert self.p(two_piece_partition(0.4)) == {0, 1}
        assert self.p(two_piece_partition(0.1)) == {1}

    def test_canonicalize_drops_redundant_breakpoints(self):
        q = TwoPiecePreference((0, 0.2, 0.4, 1), (R, R, L))
        assert q == self.p
        assert canonicalize((0, 0.5, 1), (L, L)) == ((0, 1), (L,))

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            TwoPiecePreference((0, 0.5, 1), (R,))
        with pytest.raises(ValueError):
            TwoPiecePreference((0.1, 1), (R,))
        with pytest.raises(ValueError):
            TwoPiecePreference((0, 0.5, 1), (R, B))

    def test_shapes(self):
        assert self.p.is_hungry and self.p.is_monotone and not self.p.is_lazy
        multi = TwoPiecePreference.alternating([0.2, 0.5, 0.8])
        assert multi.is_hungry and not multi.is_monotone
        assert TwoPiecePreference.alternating([0.3], L).is_lazy

    def test_mirror(self):
        m = self.p.mirrored()
        for x in (0, 0.1, 0.4, 0.6, 0.9, 1):
            assert m.eval(1 - x) is self.p.eval(x).swapped()

    @given(st.lists(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)),
                    min_size=1, max_size=8, unique=True), st.sampled_from([R, L]))
    def test_closed_sets(self, switches, first):
        p = TwoPiecePreference.alternating(sorted(switches), first)
        pts = [Fraction(0), *p.switch_points, Fraction(1)]
        for k, s in enumerate(pts[1:-1], 1):
            assert p.eval(s) is B
            eps = min(s - pts[k - 1], pts[k + 1] - s) / 2
            assert {p.eval(s - eps), p.eval(s + eps)} == {L, R}


class TestAdditive:
    def test_utilities(self):
        u = AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [2, 0])
        assert u.total == 1
        assert u.value(0.25, 0.75) == 0.5
        assert u.piece_values(Partition((0.25, 0.75))) == [0.5, 0.5]

    def test_blocks_must_cover(self):
        with pytest.raises(ValueError):
            AdditivePiecewiseConstant(((0, 0.5, 1),))
        with pytest.raises(ValueError):
            AdditivePiecewiseConstant(((0, 0.5, 1), (0.6, 1, 1)))

    def test_demands_on_five_player_instance(self):
        players = gen_counterexample(5)
        half = two_piece_partition(0.5)
        assert additive_demand(players[2], half) == {0, 1}
        assert additive_demand(players[0], half) == {0}
        assert additive_demand(AdditivePiecewiseConstant.uniform(), half) == {0, 1}

    def test_cost_demand(self):
        c = AdditivePiecewiseConstant.uniform()
        assert cost_demand(c, Partition((0, 0.2, 0.8))) == {0}
        assert cost_demand(c, Partition((0, 0, 1))) == {0, 1}

    def test_exact_breakpoints(self):
        u = AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [3, 1])
        p = exact_two_piece(AdditivePlayer(u))
        assert p.switch_points == (Fraction(1, 3),)
        assert p.is_hungry
        lazy = exact_two_piece(AdditivePlayer(u, "lazy"))
        assert lazy.is_lazy and lazy.switch_points == (Fraction(1, 3),)

    def test_exact_breakpoints_match_demand(self):
        edges = [Fraction(v) for v in ("0", "1/5", "3/10", "7/10", "1")]
        u = AdditivePiecewiseConstant.from_edges(edges, [1, -4, 2, 1])
        player = AdditivePlayer(u)
        p = exact_two_piece(player)
        for k in range(1, 1000):
            x = Fraction(k, 1000)
            if x not in p.switch_points:
                assert p(two_piece_partition(x)) == player(two_piece_partition(x))


class TestValidators:
    def test_hungry_two_piece(self):
        assert validate_hungry(TwoPiecePreference((0, 0.4, 1), (R, L)))
        report = validate_hungry(TwoPiecePreference((0, 0.4, 1), (L, R)))
        assert not report and report.exact
        assert report.violations[0][0] == Partition((0, 1))

    def test_hungry_additive(self):
        u = AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [1, 2])
        assert validate_hungry(AdditivePlayer(u), m=3)
        assert not validate_hungry(AdditivePlayer(gen_counterexample(5)[1]))

    def test_hungry_generic_callable(self):
        def wants_first(x):
            return frozenset({0})
        report = validate_hungry(wants_first, m=2, resolution=10)
        assert not report and not report.exact

    def test_lazy(self):
        c = AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [1, 2])
        assert validate_lazy(AdditivePlayer(c, "lazy"), m=3)
        assert validate_lazy(TwoPiecePreference((0, 0.4, 1), (L, R)))
        assert not validate_lazy(TwoPiecePreference((0, 0.4, 1), (R, L)))

    def test_lazy_zero_block_fails(self):
        c = AdditivePiecewiseConstant.from_edges([0, 0.3, 1], [0, 1])
        assert not validate_lazy(AdditivePlayer(c, "lazy"), m=3)
        assert not validate_lazy(AdditivePlayer(c, "lazy"), m=4)
        assert validate_lazy(AdditivePlayer(c, "lazy"), m=2)

    def test_lazy_exact_agrees_with_grid(self):
        costs = [
            AdditivePiecewiseConstant.from_edges([0, 0.3, 1], [0, 1]),
            AdditivePiecewiseConstant.from_edges([0, 0.5, 1], [1, 2]),
            AdditivePiecewiseConstant.from_edges([0, 0.4, 0.6, 1], [1, 0, 1]),
        ]
        for c in costs:
            for m in (2, 3, 4):
                exact = validate_lazy(AdditivePlayer(c, "lazy"), m)
                sampled = validate_lazy(lambda x, c=c: cost_demand(c, x), m, resolution=10)
                assert exact.ok == sampled.ok, (c, m)
