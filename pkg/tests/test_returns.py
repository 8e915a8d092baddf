import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arbordyn import arith, returns
from arbordyn.returns import FiniteMPS
from arbordyn.treespec import EventuallyPeriodicSet as E

Z4, Z6 = FiniteMPS.rotation(4), FiniteMPS.rotation(6)


def test_system_validation():
    with pytest.raises(ValueError):
        FiniteMPS((0, 0), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ValueError):
        FiniteMPS((1, 0), (Fraction(1, 3), Fraction(2, 3)))  # not invariant
    mps = returns.parse_system(5, "2+3")
    assert [len(c) for c in mps.cycles()] == [2, 3] and mps.period == 6 and not mps.is_ergodic()
    assert returns.parse_system(3, "1,2,0").is_ergodic()
    assert returns.parse_subset("{0,3}") == frozenset({0, 3})


def test_correlations():
    assert returns.correlation(Z6, {0, 3}) == tuple(Fraction(x, 3) for x in (1, 0, 0, 1, 0, 0))
    assert returns.correlation(Z4, {0, 1}) == (Fraction(1, 2), Fraction(1, 4), 0, Fraction(1, 4))


def test_return_sets():
    assert returns.return_set(Z6, {0, 3}) == E.multiples(3)
    rd = returns.delta_return_set(Z4, {0, 1}, Fraction(1, 2))
    assert rd.members_below(8) == [0, 1, 3, 4, 5, 7]
    rs = returns.return_sets(Z4, {0, 1}, delta=Fraction(1, 2), gamma=Fraction(1, 2), m=1, eps=Fraction(1, 2), B={2})
    assert rs.densities()["R"] == Fraction(3, 4)
    assert rs.R_AB.members_below(8) == [1, 2, 5, 6]


def test_kneser_structure():
    kd = returns.kneser_structure(E.multiples(3))
    assert kd.k == 3 and kd.K == (0,) and kd.kneser_holds
    kd = returns.kneser_structure({0, 1}, 8)
    assert kd.sumset == (0, 1, 2) and kd.stabilizer == (0,)
    assert len(kd.sumset) == 2 * len(kd.K) - 1
    with pytest.raises(ValueError):
        returns.kneser_structure(E.finite([1, 2]))


def test_kneser_sweep_small():
    res = returns.kneser_sweep(7)
    assert res["checked"] > 0 and res["violations"] == []


def test_partition_theorems():
    rep = returns.verify_thm_partition(Z6, {0, 3})
    assert rep.equality_applicable and rep.equality_k == 3 and rep.equality_holds
    assert rep.stability_applicable and rep.R_is_kN == 3 and rep.stability_holds
    rep = returns.verify_thm_partition(Z4, {0, 1})
    assert not rep.equality_applicable


def test_appendix_examples():
    rep = returns.verify_appendix(Z4, {0}, eta=0)
    assert rep.heavy_holds and rep.triple_holds and rep.small_delta_k == 4
    rep = returns.verify_appendix(Z6, {0, 3}, eta=0)
    assert rep.small_delta_k == 3 and rep.small_delta_holds
    rep = returns.verify_appendix(FiniteMPS.rotation(3), {0}, eta=0)
    assert rep.triple_holds


def test_nonergodic_fixture():
    mps, A = returns.nonergodic_fixture()
    assert mps.measure(A) == Fraction(139, 280)
    assert arith.density(returns.return_set(mps, A)) == Fraction(4, 7)
    rep = returns.verify_appendix(mps, A)
    assert rep.eta == Fraction(21, 139)
    assert rep.heavy_holds and rep.small_delta_k is None
    assert not returns.verify_thm_partition(mps, A).stability_holds


def test_lemma_sum_examples():
    rep = returns.lemma_sum_check(Z6, {0, 3}, Fraction(1, 4), Fraction(1, 4))
    assert rep.closure_holds and rep.density_branch and rep.density_equal
    with pytest.raises(ValueError):
        returns.lemma_sum_check(Z6, {0, 3}, Fraction(1, 2), Fraction(1, 2))


def test_transfer_probe():
    p = returns.transfer_inequality_probe(Z6, {0, 3}, {0, 3}, {0, 3})
    assert p.lhs == p.rhs == Fraction(1, 9)
    full = set(range(4))
    assert returns.transfer_inequality_probe(Z4, full, full, full).lhs == 1
    p = returns.transfer_inequality_probe(Z4, {0, 1}, {0}, {2})
    assert (p.mu_C, p.d_AB, p.d_AC, p.d_BC) == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    assert p.lhs == p.rhs == Fraction(1, 8)


def test_sweeps_small():
    assert returns.mean_ergodic_sweep(6)["violations"] == []
    assert returns.partition_sweep(6)["counterexamples"] == []
    assert returns.sum_closure_sweep(4)["failures"] == []
    res = returns.transfer_probe_sweep(20, 6, seed=0)
    assert res == returns.transfer_probe_sweep(20, 6, seed=0)


@st.composite
def weighted_systems(draw):
    lengths = draw(st.lists(st.integers(1, 4), min_size=1, max_size=3))
    masses = draw(st.lists(st.integers(1, 9), min_size=len(lengths), max_size=len(lengths)))
    total = sum(masses)
    mps = FiniteMPS.from_cycles(lengths, [Fraction(m, total) for m in masses])
    A = draw(st.sets(st.integers(0, mps.n - 1), min_size=1))
    return mps, frozenset(A)


@given(weighted_systems())
@settings(max_examples=80, deadline=None)
def test_mean_ergodic_bound_on_weighted_systems(sys_a):
    mps, A = sys_a
    R = returns.return_set(mps, A)
    assert arith.densities(R).lower >= mps.measure(A)


@given(weighted_systems(), st.fractions(0, 1).filter(bool), st.fractions(0, 1).filter(bool))
@settings(max_examples=60, deadline=None)
def test_threshold_sets_nest(sys_a, d1, d2):
    mps, A = sys_a
    lo, hi = min(d1, d2), max(d1, d2)
    assert returns.delta_return_set(mps, A, hi).issubset(returns.delta_return_set(mps, A, lo))
    assert returns.delta_return_set(mps, A, lo).issubset(returns.return_set(mps, A))
    corr = returns.correlation(mps, A)
    assert len(corr) == mps.period and corr[0] == mps.measure(A)


@given(st.integers(2, 7), st.data())
@settings(max_examples=60, deadline=None)
def test_kneser_inequality_random(k, data):
    A = data.draw(st.sets(st.integers(0, k - 1), min_size=1))
    B = data.draw(st.sets(st.integers(0, k - 1), min_size=1))
    S = {(a + b) % k for a, b in itertools.product(A, B)}
    H = [g for g in range(k) if {(s + g) % k for s in S} == S]
    assert len(S) >= len(A) + len(B) - len(H)
