from fractions import Fraction

import pytest

from fairslice.adversary import (
    BUILTIN_PROTOCOLS, AdversaryInvariantError, AdversaryOracle, AdversaryState, additive_representation,
    duel, finalize, fixed_cut,
)
from fairslice.core import Assignment, Side, TwoPiecePreference, two_piece_partition, validate_hungry
from fairslice.queries import answer_query

R, L, B = Side.RIGHT, Side.LEFT, Side.BOTH
F = Fraction


def fresh(n=4):
    state = AdversaryState(n)
    return state, AdversaryOracle(state)


def test_initial_state():
    state, _ = fresh()
    assert state.intervals == [[0, 0], [1, 1]]
    assert state.gaps() == [(0, 1)]


def test_first_query_at_zero():
    state, oracle = fresh()
    oracle.first_indifference(2)
    assert state.intervals[0] == [0, F(1, 2)]


def test_first_query_inside():
    state, oracle = fresh()
    assert oracle.evaluate(1, F(2, 5)) is B
    assert [F(1, 5), F(7, 10)] in state.intervals
    assert state.switches[1] == [F(2, 5), F(1, 2)]
    for p in (0, 2, 3):
        assert state.label(p, F(3, 5)) is R
    assert state.label(1, F(9, 20)) is L


def test_first_query_at_one():
    state, oracle = fresh()
    oracle.evaluate(0, 1)
    assert state.intervals[-1] == [F(1, 2), 1]
    assert state.switches[0] == [F(7, 10), F(4, 5)]
    for p in (1, 2, 3):
        assert state.label(p, F(3, 5)) is L
    assert state.label(0, F(3, 4)) is R


def test_answers_are_decided_by_known_information():
    state, oracle = fresh()
    x = oracle.next_indifference(0, F(1, 3))
    assert state.is_known(x)
    assert oracle.previous_indifference(0, F(1, 3)) is not None


def test_gaps_stay_open_and_majority_holds():
    state, oracle = fresh(5)
    for k in range(200):
        oracle.evaluate(k % 5, F(k * 37 % 101, 101))
        assert all(a < b for a, b in state.gaps())
    for lo, hi in state.intervals:
        for t in range(11):
            x = lo + (hi - lo) * F(t, 10)
            side, supporters = state.majority_side(x)
            assert side is not B and len(supporters) >= 4


def test_unknown_label_is_a_bug():
    state, _ = fresh()
    with pytest.raises(AdversaryInvariantError):
        state.label(0, F(1, 2))


def test_completion_of_fresh_state():
    state, _ = fresh(3)
    prefs = state.complete()
    assert all(p == TwoPiecePreference((0, F(1, 2), 1), (R, L)) for p in prefs)


def test_completion_after_one_query():
    state, oracle = fresh()
    oracle.evaluate(0, F(2, 5))
    z = state.completion_point()
    assert F(7, 10) < z < 1
    prefs = state.complete()
    assert oracle.transcript.replay(lambda q: answer_query(prefs[q.player], q)) == []
    assert all(validate_hungry(p) for p in prefs)


def test_zero_query_protocol_gets_a_virtual_query():
    r = duel(fixed_cut(F(1, 2)), 4, (2, 2))
    assert len(r.transcript) == 0 and len(r.virtual_queries) == 1
    assert r.outcome == "not envy-free" and r.consistent


def test_cut_at_one_is_defeated():
    r = duel(fixed_cut(1), 4, (2, 2))
    assert r.outcome == "not envy-free"


@pytest.mark.parametrize("name", sorted(BUILTIN_PROTOCOLS))
def test_builtin_protocols_are_defeated(name):
    r = duel(BUILTIN_PROTOCOLS[name](0), 4, (2, 2), max_queries=300)
    assert r.outcome == "not envy-free"
    assert r.consistent
    envious, piece = r.verdict
    assert r.assignment.group_of(envious) != piece
    assert r.completed[envious](r.assignment.partition) == {piece}
    assert not r.envy_free


def test_other_sizes():
    for n, sizes in ((5, (2, 3)), (6, (3, 3)), (7, (4, 3))):
        r = duel(BUILTIN_PROTOCOLS["binary-search"](0), n, sizes, max_queries=200)
        assert r.outcome == "not envy-free" and r.consistent


def test_budget_exhaustion_is_reported():
    def greedy(oracle, sizes):
        while True:
            oracle.evaluate(0, F(1, 3))
    r = duel(greedy, 4, (2, 2), max_queries=10)
    assert r.budget_exhausted and r.outcome == "budget exhausted"
    assert r.consistent


def test_singleton_group_is_refused():
    with pytest.raises(ValueError):
        duel(fixed_cut(F(1, 2)), 4, (1, 3))
    state = AdversaryState(4)
    with pytest.raises(ValueError):
        finalize(state, AdversaryOracle(state).transcript,
                 Assignment(two_piece_partition(F(1, 2)), ({0}, {1, 2, 3})))


def test_additive_representation_single_switch():
    p = TwoPiecePreference((0, F(2, 5), 1), (R, L))
    u = additive_representation(p)
    assert u(F(1, 5)) == F(1, 4) and u(F(7, 10)) == F(3, 4)
    assert u.crossings() == [F(2, 5)]


def test_additive_representation_two_switches_is_signed():
    state, oracle = fresh()
    oracle.evaluate(1, F(2, 5))
    p = state.complete()[1]
    assert F(2, 5) in p.switch_points and F(1, 2) in p.switch_points
    u = additive_representation(p)
    assert len(u.crossings()) == len(p.switch_points) >= 3
    assert any(d < 0 for d in u.densities())
