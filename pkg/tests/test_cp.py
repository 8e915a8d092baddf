import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arbordyn import cp, geometry
from arbordyn.treespec import (
    AutomatonTree,
    PeriodicSequence,
    ProfileTree,
    full_tree,
    iter_level,
    make_named_tree,
)

FIXTURES = cp.example_markov_trees()
CHAINS = {name: cp.build_cp_chain(tau) for name, tau in FIXTURES.items()}
T23 = make_named_tree("T_kN", 2, 2, k=3)


def rand_fn(rng, n):
    return [rng.uniform(-1, 1) for _ in range(n)]


def test_fixture_chain_sizes():
    assert {k: len(c) for k, c in CHAINS.items()} == {
        "T2_3N": 4, "full2": 2, "T_eps": 11, "T4_E2N": 6, "T3_2N": 4, "skewed3": 6, "two_classes": 4}
    assert all(c.is_ergodic() for k, c in CHAINS.items() if k != "two_classes")
    assert not CHAINS["two_classes"].is_ergodic()
    assert CHAINS["two_classes"].stationary == [Fraction(1, 6), Fraction(1, 6), Fraction(2, 3), Fraction(0)]


def test_uniform_t23_chain():
    chain = CHAINS["T2_3N"]
    assert sorted(chain.state_marginal().values()) == [Fraction(1, 3)] * 3
    assert cp.measure_of_splitting(chain, 2).measure == Fraction(1, 3)
    ent = cp.info_and_entropy(chain)
    assert abs(ent.total - 1 / 3) < 1e-12
    spl = cp.measure_of_splitting(chain, 2)
    assert spl.holds and spl.equality


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_kernel_is_stochastic(name):
    chain = CHAINS[name]
    assert cp.apply_P(chain, [Fraction(1)] * len(chain)) == [Fraction(1)] * len(chain)
    pi = chain.stationary
    assert sum(pi) == 1
    # stationarity: pi K = pi
    flow = [sum((pi[s] * row.get(t, 0) for s, row in enumerate(chain.kernel)), Fraction(0)) for t in range(len(chain))]
    assert flow == pi


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_adjointness_random_pairs(name):
    chain = CHAINS[name]
    rng = random.Random(0)
    for _ in range(100):
        f, g = rand_fn(rng, len(chain)), rand_fn(rng, len(chain))
        lhs = cp.inner(chain, cp.apply_P(chain, f), g)
        rhs = cp.inner(chain, f, cp.apply_S(chain, g))
        assert abs(lhs - rhs) < 1e-12


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_shift_identities_on_window_chain(name):
    ext = cp.endomorphic_extension(CHAINS[name], 1)
    rng = random.Random(1)
    base_n = len(CHAINS[name])
    for _ in range(100):
        f = rand_fn(rng, len(ext))
        g = cp.lift_function(ext, rand_fn(rng, base_n))
        Sg = cp.apply_S(ext, g)
        lhs = cp.apply_P(ext, [a * b for a, b in zip(f, Sg)])
        rhs = [a * b for a, b in zip(g, cp.apply_P(ext, f))]
        assert max(abs(a - b) for a, b in zip(lhs, rhs)) < 1e-12
        assert max(abs(a - b) for a, b in zip(cp.apply_P(ext, Sg), g)) < 1e-12


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_projections(name):
    chain = CHAINS[name]
    rng = random.Random(2)
    f = [Fraction(rng.randint(-5, 5)) for _ in range(len(chain))]
    inv = cp.project_invariant(chain, f)
    assert inv.nonincreasing
    assert cp.apply_P(chain, inv.projection) == inv.projection
    tail = cp.project_tail(chain, f)
    assert tail.nonincreasing


def test_cyclic_phases_of_periodic_chain():
    phases = cp.cyclic_phases(CHAINS["T2_3N"])
    assert [d for d, _ in phases] == [3]


def test_splitting_bound_on_every_fixture():
    for name, chain in CHAINS.items():
        for r in range(2, chain.q + 1):
            assert cp.measure_of_splitting(chain, r).holds, name


def test_skewed_chain_entropy_matches_markov_dim():
    tau = FIXTURES["skewed3"]
    ent = cp.info_and_entropy(CHAINS["skewed3"]).total
    assert abs(geometry.markov_dim(tau).exact_rate - ent) < 1e-12


def test_conditional_and_metric():
    tau = FIXTURES["T2_3N"]
    sub = cp.conditional(tau, (0,))
    assert sub.weight((0, 0)) == 1 and sub.weight((0, 0, 1)) == Fraction(1, 2)
    assert tau.weight((0, 0, 0)) == Fraction(1, 2)
    d = cp.markov_metric(tau, tau, 8)
    assert d.lo == 0 and d.hi == Fraction(2, 2 ** 8)
    far = cp.markov_metric(tau, FIXTURES["full2"], 10)
    assert 0 < far.lo <= far.hi
    with pytest.raises(ValueError):
        cp.conditional(tau, (0, 1))


@given(st.integers(2, 3), st.lists(st.integers(1, 3), min_size=1, max_size=4), st.lists(st.integers(1, 3), max_size=2))
@settings(max_examples=25, deadline=None)
def test_empirical_entropy_matches_dimension(q, per, pre):
    tree = ProfileTree(q, PeriodicSequence(tuple(min(x, q) for x in pre), tuple(min(x, q) for x in per)))
    P, p = len(tree.splitting.period), len(tree.splitting.preperiod)
    L = p + 6 * P - 1
    emp = cp.empirical_distribution(tree, L)
    assert sum(emp.weights.values()) == 1
    dim = geometry.minkowski_dim(tree).value
    # entropy equals log_q|T(L+1)| / (L+1); the preperiod shifts it by O(p / L)
    direct = math.log(math.prod(tree.splitting[j] for j in range(L + 1)), q) / (L + 1)
    assert abs(emp.entropy - direct) < 1e-12
    if p == 0:
        assert abs(emp.entropy - dim) < 1e-12


def test_return_times():
    chain = CHAINS["T2_3N"]
    a2 = [i for i, x in enumerate(cp.indicator_A(chain, 2)) if x]
    rt = cp.return_times(chain, a2, 9)
    assert rt.measure_A == Fraction(1, 3)
    assert rt.correlations[:7] == [Fraction(1, 3), 0, 0, Fraction(1, 3), 0, 0, Fraction(1, 3)]
    assert rt.returns.members_below(10) == [0, 3, 6, 9]


def test_bad_probabilities_rejected():
    aut = AutomatonTree(2, ("a",), "a", {("a", 0): "a", ("a", 1): "a"})
    with pytest.raises(ValueError):
        cp.FiniteStateMarkovTree(aut, {"a": (Fraction(1, 2), Fraction(1, 3))})
    path = AutomatonTree(2, ("a",), "a", {("a", 0): "a"})
    with pytest.raises(ValueError):
        cp.FiniteStateMarkovTree(path, {"a": (Fraction(1, 2), Fraction(1, 2))})


def test_uniform_tree_weights():
    tau = cp.uniform_markov_tree(full_tree(3))
    assert all(tau.weight(w) == Fraction(1, 9) for w, _ in iter_level(full_tree(3), 2))
