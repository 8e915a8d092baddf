from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arbordyn import arith
from arbordyn.treespec import EventuallyPeriodicSet as E

sets = st.builds(lambda pre, per: E(tuple(pre), tuple(per)),
                 st.lists(st.booleans(), max_size=5), st.lists(st.booleans(), min_size=1, max_size=8))


def test_density_examples():
    assert arith.densities(E.parse("3N")) == arith.DensityTriple(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
    # window oracle: every window of the period length holds 3 of 8 residues
    d = arith.densities(E.parse("2N\\8N"))
    assert d.banach == Fraction(3, 8)
    assert arith.banach_window_scan(E.parse("2N\\8N"), 32)[-1] == (32, Fraction(3, 8))


@given(sets)
def test_banach_matches_window_oracle(s):
    P = len(s.period)
    c = sum(s.period)
    assert arith.densities(s).banach == Fraction(c, P)
    assert arith.window_max(s, P) >= c
    scan = arith.banach_window_scan(s, 4 * P)
    assert Fraction(arith.window_max(s, P), P) >= Fraction(c, P)
    for L, avg in scan:
        if L >= P:
            assert abs(avg - Fraction(c, P)) <= Fraction(len(s.preperiod) + P, L)
        if L % P == 0 and len(s.preperiod) == 0:
            assert avg == Fraction(c, P)


@given(sets, sets)
def test_sumset_matches_brute_force(a, b):
    s = arith.sumset(a, b)
    am = [x for x in range(60) if x in a]
    bm = [x for x in range(60) if x in b]
    brute = {x + y for x in am for y in bm}
    for n in range(60):
        assert (n in s) == (n in brute)


@given(sets)
def test_popular_differences_brute(s):
    pop = arith.popular_differences(s)
    for m in range(len(s.period) * 2):
        assert (m in pop) == (arith.density(s & s.shift(m)) > 0)


def test_ap_density_examples():
    e = E.parse("2N\\8N")
    assert arith.ap_density(e, 2, 3, "banach") == Fraction(1, 8)
    assert arith.ap_density(e, 2, 4, "banach") == 0
    assert arith.ap_density(E.parse("3N"), 3, 5) == Fraction(1, 3)


def test_inverse_props():
    rep = arith.verify_inverse_props(E.parse("3N"))
    assert rep.applicable and rep.k == 3 and rep.conclusion_holds
    rep = arith.verify_inverse_props(E.parse("{0}|2N+1"))
    assert rep.applicable and rep.k == 2 and rep.conclusion_holds
    rep = arith.verify_inverse_props(E.parse("4N|4N+1"))
    assert not rep.applicable
    rep = arith.verify_inverse_props(E.parse("2N\\8N"), "banach")
    assert rep.ratio == Fraction(4, 3) and rep.applicable and rep.k == 2 and rep.conclusion_holds
    with pytest.raises(ValueError):
        arith.popular_differences(E.parse("N"), "lower")
