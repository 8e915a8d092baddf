import math
from fractions import Fraction

import pytest

from arbordyn import cp, detect
from arbordyn.treespec import AutomatonTree, make_configuration, make_named_tree

FIXTURES = cp.example_markov_trees()
CHAINS = {name: cp.build_cp_chain(tau) for name, tau in FIXTURES.items()}
T23 = make_named_tree("T_kN", 2, 2, k=3)
F2 = make_configuration("F", 2, r=2)


def test_phi_f2_on_t23():
    chain = CHAINS["T2_3N"]
    assert detect.evaluate(detect.build_phi(F2, 3), chain) == [1, 0, 0, 0]
    assert detect.evaluate(detect.build_phi(F2, 1), chain) == [0, 0, 0, 0]
    assert detect.evaluate_at_root(detect.build_phi(F2, 3), chain) == 1


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_closed_form_for_full_split_configuration(name):
    chain = CHAINS[name]
    for r in range(2, chain.q + 1):
        conf = make_configuration("F", chain.q, r=r)
        for m in range(1, 9):
            assert detect.evaluate(detect.build_phi(conf, m), chain) == detect.closed_form_F(chain, r, m)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_full_rary_detector_is_factorial_multiple(name):
    chain = CHAINS[name]
    for r in range(2, chain.q + 1):
        conf = make_configuration("D", chain.q, r=r, n=2)
        for m in range(1, 4):
            phi = detect.evaluate(detect.build_phi(conf, m), chain)
            prime = detect.evaluate(detect.build_phi(conf, m, "phi_prime"), chain)
            assert phi == [math.factorial(r) * x for x in prime]


def test_d22_values_on_t32():
    chain = CHAINS["T3_2N"]
    conf = make_configuration("D", 3, r=2, n=2)
    assert detect.evaluate(detect.build_phi(conf, 1), chain) == [0, 0, 0, 0]
    phi = detect.evaluate(detect.build_phi(conf, 2), chain)
    prime = detect.evaluate(detect.build_phi(conf, 2, "phi_prime"), chain)
    # three letter pairs, two bijections each, weight (1/3)^2 per placement
    assert phi[0] == Fraction(2, 3) and prime[0] == Fraction(1, 3)


def test_phi_prime_needs_isomorphic_children():
    conf = make_configuration("F", 2, r=2)
    with pytest.raises(ValueError, match="isomorphic"):
        detect.build_phi(conf, 1, "phi_prime")
    with pytest.raises(ValueError):
        detect.build_phi(conf, 0)


def test_nonbranching_configuration_is_one():
    path = make_configuration("words", 2, words=[(), (1,), (1, 0)])
    assert detect.evaluate(detect.build_phi(path, 4), CHAINS["full2"]) == [1, 1]


def test_delta_threshold():
    chain = CHAINS["skewed3"]
    conf = make_configuration("F", 3, r=3)
    plain = detect.evaluate(detect.build_phi(conf, 2), chain)
    strict = detect.evaluate(detect.build_phi(conf, 2, delta=Fraction(1, 5)), chain)
    # state a has letter weights (1/2, 1/3, 1/6): the threshold 1/5 removes its third letter
    assert plain[:2] == [Fraction(3, 10)] * 2 and strict == [0] * 6
    assert all(0 <= s <= p for s, p in zip(strict, plain))
    assert any(s < p for s, p in zip(strict, plain))


def test_shared_subexpressions():
    conf = make_configuration("V", 2, r=2, k=3, n=12)
    stats = detect.expr_stats(detect.build_phi(conf, 1, "phi_prime"))
    assert stats["nodes"] < 200


def test_varphi_counts_embeddings_weighted():
    chain = CHAINS["full2"]
    conf = make_configuration("D", 2, r=2, n=1)
    assert detect.evaluate(detect.build_phi(conf, 1, "varphi"), chain) == [Fraction(1, 2), Fraction(1, 2)]


@pytest.mark.parametrize("tree,conf,m", [
    (T23, F2, 3), (T23, F2, 2), (make_named_tree("T_eps", 2, 2, k=2, N=4), F2, 2),
    (make_named_tree("T_E", 4, 3, E="2N"), make_configuration("D", 4, r=3, n=2), 2),
])
def test_soundness_examples(tree, conf, m):
    assert detect.soundness_check(tree, conf, m).agree


def test_soundness_on_automaton_tree():
    aut = AutomatonTree(2, (0, 1), 0, {(0, 0): 1, (0, 1): 1, (1, 0): 0})
    for m in (1, 2, 3):
        assert detect.soundness_check(aut, F2, m).agree


@pytest.mark.parametrize("q,r,k", [(2, 2, 3), (2, 2, 1), (3, 2, 2), (4, 3, 4), (3, 3, 2)])
def test_equality_case_identities(q, r, k):
    chain = cp.build_cp_chain(cp.uniform_markov_tree(make_named_tree("T_kN", q, r, k=k)))
    rep = detect.equality_case_identities(chain, q, r, k, n_max=2)
    assert rep.c1 == Fraction(1, q ** q) and rep.c2 == Fraction(1, (r - 1) ** (r - 1))
    assert rep.first_holds and rep.second_holds and rep.holds


def test_identities_reject_other_chains():
    with pytest.raises(ValueError):
        detect.equality_case_identities(CHAINS["skewed3"], 3, 2, 2)


def test_corpus_agreement_small():
    configs = [F2, make_configuration("D", 2, r=2, n=2)]
    res = detect.corpus_agreement([(T23, FIXTURES["T2_3N"])], configs, [1, 2, 3], depth=7)
    assert res["checked"] > 0 and res["disagreements"] == []
