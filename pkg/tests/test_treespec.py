import json

import pytest
from hypothesis import given, strategies as st

from arbordyn.treespec import (
    AutomatonTree,
    Configuration,
    EventuallyPeriodicSet,
    ExplicitTree,
    PeriodicSequence,
    ProfileTree,
    dumps_tree,
    full_tree,
    iter_level,
    level_count,
    loads_tree,
    make_configuration,
    make_named_tree,
    parse_configuration,
    splitting_levels,
    subtree,
    truncate,
)

E = EventuallyPeriodicSet
flags = st.lists(st.booleans(), max_size=6)
periods = st.lists(st.booleans(), min_size=1, max_size=6)


def brute(s, n=60):
    return [i in s for i in range(n)]


@given(flags, periods)
def test_canonical_form_is_unique(pre, per):
    a = E(tuple(pre), tuple(per))
    b = E(tuple(pre) + tuple(per), tuple(per) * 2)
    assert a == b
    assert brute(a) == brute(b)


@given(flags, periods, flags, periods)
def test_set_algebra_matches_pointwise(p1, q1, p2, q2):
    a, b = E(tuple(p1), tuple(q1)), E(tuple(p2), tuple(q2))
    for n in range(80):
        assert ((n in a) and (n in b)) == (n in (a & b))
        assert ((n in a) or (n in b)) == (n in (a | b))
        assert ((n in a) and not (n in b)) == (n in (a - b))
        assert (not (n in a)) == (n in a.complement())


@given(flags, periods, st.integers(0, 8))
def test_shift_and_translate(pre, per, m):
    a = E(tuple(pre), tuple(per))
    for n in range(60):
        assert (n in a.shift(m)) == ((n + m) in a)
        assert (n in a.translate(m)) == (n >= m and (n - m) in a)


def test_parse_shorthand():
    assert E.parse("3N").members_below(10) == [0, 3, 6, 9]
    assert E.parse("2N\\8N").members_below(17) == [2, 4, 6, 10, 12, 14]
    assert E.parse("3N+1").members_below(8) == [1, 4, 7]
    assert E.parse("{0,2}").members_below(10) == [0, 2]
    assert E.parse("empty").is_empty()
    assert E.parse("N") == E.everything()
    with pytest.raises(ValueError):
        E.parse("bogus")


def test_periodic_sequence_canonical():
    assert PeriodicSequence((2, 1, 2, 1), (2, 1)) == PeriodicSequence((), (2, 1))
    assert PeriodicSequence((), (2, 1, 2, 1)).period == (2, 1)


def test_named_trees():
    t = make_named_tree("T_kN", 2, 2, k=3)
    assert [level_count(t, n) for n in range(7)] == [1, 2, 2, 2, 4, 4, 4]
    assert splitting_levels(t) == E.multiples(3)
    eps = make_named_tree("T_eps", 2, 2, k=2, N=4)
    assert splitting_levels(eps) == E.parse("2N\\8N")
    te = make_named_tree("T_E", 4, 3, E="2N")
    assert te.splitting.period == (4, 2)
    with pytest.raises(ValueError):
        make_named_tree("T_kN", 2, 3, k=1)


def test_configurations():
    f2 = make_configuration("F", 2, r=2)
    assert sorted(f2.words) == [(), (0,), (0, 0), (0, 1), (1,)]
    assert f2.height == 2 and f2.is_branching()
    d = make_configuration("D", 3, r=2, n=3)
    assert len(d) == 15
    v = make_configuration("V", 2, r=2, k=3, n=3)
    assert len(v) == 11 and v.height == 4
    assert parse_configuration("F2", 2) == f2
    assert parse_configuration("{,0,1}", 2) == make_configuration("D", 2, r=2, n=1)
    with pytest.raises(ValueError):
        Configuration(2, frozenset({(0, 1)}))


def test_shape_isomorphism_ignores_letters():
    a = Configuration(3, frozenset({(), (0,), (2,), (2, 1)}))
    b = Configuration(3, frozenset({(), (1,), (1, 0), (2,)}))
    assert a.isomorphic(b)
    assert not a.isomorphic(make_configuration("F", 3, r=2))


def test_automaton_and_explicit_trees():
    aut = AutomatonTree(2, ("a", "b"), "a", {("a", 0): "a", ("a", 1): "b", ("b", 0): "a"})
    assert [level_count(aut, n) for n in range(6)] == [1, 2, 3, 5, 8, 13]
    tr = truncate(aut, 4)
    assert isinstance(tr, ExplicitTree)
    assert level_count(tr, 4) == 8
    assert [w for w, _ in iter_level(aut, 2)] == [(0, 0), (0, 1), (1, 0)]
    assert level_count(subtree(aut, (1,)), 2) == 2
    with pytest.raises(ValueError):
        AutomatonTree(2, ("a", "b"), "a", {("a", 0): "b"})
    with pytest.raises(ValueError):
        ExplicitTree(2, 2, frozenset({(), (0,)}))


@pytest.mark.parametrize("tree", [
    full_tree(3),
    make_named_tree("T_eps", 2, 2, k=2, N=4),
    ProfileTree(3, PeriodicSequence((1, 2), (3, 1))),
    AutomatonTree(2, ("a", "b"), "a", {("a", 0): "a", ("a", 1): "b", ("b", 0): "a"}),
    truncate(full_tree(2), 3),
])
def test_json_roundtrip(tree):
    text = dumps_tree(tree)
    json.loads(text)
    assert loads_tree(text) == tree
